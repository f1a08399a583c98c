// Binary model files and the text weight dump.
//
// Layout (little-endian):
//   "LASOEDT\0"  u32 version
//   u64 n, config JSON
//   u64 names, then per name u64 n + bytes      (interning order)
//   u8 cutoff applied, u64 active, u64 keys
//   u64 weights, then per weight u64 key + f64 value (sorted by key)
//   u64 k
#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "laso/edt/config.hpp"
#include "laso/edt/training.hpp"

namespace laso::edt {

class model_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr char model_magic[8] = {'L', 'A', 'S', 'O', 'E', 'D', 'T', '\0'};
inline constexpr std::uint32_t model_version = 1;

namespace detail {
template <class T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
inline void put_string(std::ostream& out, const std::string& s) {
  put<std::uint64_t>(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}
template <class T>
T get(std::istream& in) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw model_error("truncated model file");
  return v;
}
inline std::string get_string(std::istream& in) {
  const auto n = get<std::uint64_t>(in);
  if (n > (1ull << 32)) throw model_error("corrupt model file");
  std::string s(n, '\0');
  if (n && !in.read(s.data(), static_cast<std::streamsize>(n))) throw model_error("truncated model file");
  return s;
}
}  // namespace detail

inline void save_model(std::ostream& out, const trained_model& m) {
  out.write(model_magic, sizeof model_magic);
  detail::put<std::uint32_t>(out, model_version);
  detail::put_string(out, to_json(m.config).dump());
  const auto& reg = m.model->registry;
  detail::put<std::uint64_t>(out, reg.names().size());
  for (const auto& n : reg.names()) detail::put_string(out, n);
  detail::put<std::uint8_t>(out, reg.cutoff_applied() ? 1 : 0);
  const auto active = reg.active_keys();
  detail::put<std::uint64_t>(out, active.size());
  for (auto k : active) detail::put<std::uint64_t>(out, k);
  const auto weights = m.w.to_sparse();
  detail::put<std::uint64_t>(out, weights.size());
  for (const auto& e : weights) {
    detail::put<std::uint64_t>(out, e.key);
    detail::put<double>(out, e.value);
  }
  detail::put<std::uint64_t>(out, m.k);
  if (!out) throw model_error("failed writing model");
}

inline void save_model(const std::filesystem::path& path, const trained_model& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw model_error("cannot write model " + path.string());
  save_model(out, m);
}

// Resources default to the paths stored in the model's config.
inline trained_model load_model(std::istream& in, std::shared_ptr<const resource_bundle> res = nullptr) {
  char magic[8];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, model_magic, sizeof magic) != 0)
    throw model_error("not a model file");
  if (const auto v = detail::get<std::uint32_t>(in); v != model_version)
    throw model_error("unsupported model version " + std::to_string(v));
  run_config cfg;
  try {
    cfg = config_from_json(nlohmann::json::parse(detail::get_string(in)));
  } catch (const nlohmann::json::exception& e) {
    throw model_error(std::string("corrupt model config: ") + e.what());
  }
  feature_registry reg;
  const auto names = detail::get<std::uint64_t>(in);
  for (std::uint64_t i = 0; i < names; ++i) reg.intern(detail::get_string(in));
  const bool cutoff = detail::get<std::uint8_t>(in) != 0;
  const auto active = detail::get<std::uint64_t>(in);
  std::vector<feature_key> keys;
  for (std::uint64_t i = 0; i < active; ++i) keys.push_back(detail::get<std::uint64_t>(in));
  if (cutoff) reg.restore_active(keys);

  trained_model m;
  m.config = cfg;
  m.resources = res ? std::move(res) : std::make_shared<const resource_bundle>(load_resources(cfg.resources));
  m.model = std::make_unique<edt_model>(cfg.spec(), *m.resources, std::move(reg));
  m.model->grow = false;
  const auto count = detail::get<std::uint64_t>(in);
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto key = detail::get<std::uint64_t>(in);
    const auto value = detail::get<double>(in);
    m.w.set(key, value);
  }
  m.k = detail::get<std::uint64_t>(in);
  return m;
}

inline trained_model load_model(const std::filesystem::path& path, std::shared_ptr<const resource_bundle> res = nullptr) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw model_error("cannot read model " + path.string());
  return load_model(in, std::move(res));
}

// One "meta-feature-name TAB weight" line per nonzero weight.
inline void dump_weights(std::ostream& out, const trained_model& m) {
  out << std::setprecision(17);
  for (const auto& e : m.w.to_sparse())
    if (e.value != 0.0) out << m.model->registry.meta_name(e.key) << '\t' << e.value << '\n';
}

}  // namespace laso::edt
