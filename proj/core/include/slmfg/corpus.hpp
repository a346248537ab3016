#pragma once

#include <string>
#include <vector>

#include "slmfg/config.hpp"
#include "slmfg/model.hpp"

namespace slmfg::corpus {

/// A built-in problem together with a prose note about its encoding.
struct CorpusEntry {
  std::string id;
  Problem problem;
  std::string note;
};

std::vector<std::string> ids();
CorpusEntry builtin(const std::string& id);

/// One expected fact, bound to the operation that checks it.
struct FactResult {
  std::string entry;
  std::string name;
  std::string checker;     // operation that verifies the fact
  std::string provenance;  // closed-form | derived-oracle | definition
  bool pass = false;
  std::string detail;
};

struct CorpusReport {
  std::vector<FactResult> results;
  bool all_pass() const {
    for (const auto& r : results)
      if (!r.pass) return false;
    return true;
  }
};

/// Execute every expected fact of the selected entry ("all" for the whole
/// corpus) through its bound checker.
CorpusReport run_corpus(const std::string& filter, const RunConfig& cfg);

}  // namespace slmfg::corpus
