#include "slmfg/config.hpp"

#include <cstdio>

namespace slmfg {

std::uint64_t sub_seed(std::uint64_t seed, const std::string& tag) {
  // FNV-1a over the tag, mixed with the base seed.
  std::uint64_t h = 14695981039346656037ull ^ seed;
  for (unsigned char c : tag) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string record_double(double v) {
  if (v == 0.0) return "0";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string record_vector(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += record_double(v[i]);
  }
  return s;
}

std::string render_config(const RunConfig& cfg) {
  std::string s;
  auto kv = [&](const char* k, const std::string& v) {
    if (!s.empty()) s += ' ';
    s += k;
    s += '=';
    s += v;
  };
  kv("seed", std::to_string(cfg.seed));
  kv("feas_tol", record_double(cfg.feas_tol));
  kv("gap_tol", record_double(cfg.gap_tol));
  kv("activity_tol", record_double(cfg.activity_tol));
  kv("rank_tol", record_double(cfg.rank_tol));
  kv("cluster_eps", record_double(cfg.cluster_eps));
  kv("box", record_double(cfg.box_lo) + "," + record_double(cfg.box_hi));
  kv("grid_step", record_double(cfg.grid_step));
  kv("radius", record_double(cfg.radius));
  kv("multistart", std::to_string(cfg.multistart));
  kv("samples", std::to_string(cfg.samples));
  return s;
}

}  // namespace slmfg
