#include "somor/manifest.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace somor {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Entry {
  std::string value;
  std::size_t line = 0;
  bool used = false;
};

class Sections {
 public:
  Sections(const std::string& text, std::string source) : source_(std::move(source)) {
    std::istringstream in(text);
    std::string raw, section;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
      ++lineno;
      std::string line = raw;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') fail(lineno, "unterminated section header");
        section = trim(line.substr(1, line.size() - 2));
        if (!known_sections().count(section)) fail(lineno, "unknown section [" + section + "]");
        if (!seen_.insert(section).second) fail(lineno, "duplicate section [" + section + "]");
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) fail(lineno, "expected 'key = value'");
      if (section.empty()) fail(lineno, "key outside of any section");
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty()) fail(lineno, "empty key");
      auto [it, fresh] = entries_.emplace(section + "." + key, Entry{value, lineno, false});
      if (!fresh) fail(lineno, "duplicate key '" + key + "' in [" + section + "]");
    }
  }

  [[noreturn]] void fail(std::size_t line, const std::string& msg) const {
    throw ParseError(source_ + ":" + std::to_string(line) + ": " + msg);
  }

  const Entry* find(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return nullptr;
    it->second.used = true;
    return &it->second;
  }

  template <class T>
  void get(const std::string& key, T& out) {
    if (const Entry* e = find(key)) out = convert<T>(*e);
  }

  template <class T>
  T convert(const Entry& e) const;

  void check_all_used() const {
    for (const auto& [key, e] : entries_) {
      if (!e.used) fail(e.line, "unknown key '" + key.substr(key.find('.') + 1) + "' in [" + key.substr(0, key.find('.')) + "]");
    }
  }

 private:
  static const std::set<std::string>& known_sections() {
    static const std::set<std::string> s{"run", "model", "generator", "nlmm", "pod", "modal",
                                         "krylov", "integrator", "training", "test", "output"};
    return s;
  }

  std::string source_;
  std::map<std::string, Entry> entries_;
  std::set<std::string> seen_;
};

template <>
double Sections::convert<double>(const Entry& e) const {
  double v = 0.0;
  const char* b = e.value.data();
  const char* end = b + e.value.size();
  if (b != end && *b == '+') ++b;
  auto res = std::from_chars(b, end, v);
  if (res.ec != std::errc() || res.ptr != end) fail(e.line, "not a number: '" + e.value + "'");
  return v;
}

template <>
long Sections::convert<long>(const Entry& e) const {
  long v = 0;
  auto res = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
  if (res.ec != std::errc() || res.ptr != e.value.data() + e.value.size()) {
    fail(e.line, "not an integer: '" + e.value + "'");
  }
  return v;
}

template <>
int Sections::convert<int>(const Entry& e) const {
  const long v = convert<long>(e);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) fail(e.line, "integer out of range");
  return static_cast<int>(v);
}

template <>
std::uint64_t Sections::convert<std::uint64_t>(const Entry& e) const {
  std::uint64_t v = 0;
  auto res = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
  if (res.ec != std::errc() || res.ptr != e.value.data() + e.value.size()) {
    fail(e.line, "not a non-negative integer: '" + e.value + "'");
  }
  return v;
}

template <>
bool Sections::convert<bool>(const Entry& e) const {
  if (e.value == "true" || e.value == "yes" || e.value == "on" || e.value == "1") return true;
  if (e.value == "false" || e.value == "no" || e.value == "off" || e.value == "0") return false;
  fail(e.line, "not a boolean: '" + e.value + "'");
}

template <>
std::string Sections::convert<std::string>(const Entry& e) const {
  return e.value;
}

template <>
std::vector<std::string> Sections::convert<std::vector<std::string>>(const Entry& e) const {
  std::vector<std::string> out;
  std::stringstream ss(e.value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) fail(e.line, "empty list item");
    out.push_back(item);
  }
  if (out.empty()) fail(e.line, "empty list");
  return out;
}

template <>
std::vector<double> Sections::convert<std::vector<double>>(const Entry& e) const {
  std::vector<double> out;
  for (const auto& item : convert<std::vector<std::string>>(e)) out.push_back(convert<double>(Entry{item, e.line}));
  return out;
}

std::string resolve(const std::string& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_absolute()) return p;
  return (std::filesystem::path(base) / path).lexically_normal().string();
}

}  // namespace

void RunManifest::validate() const {
  if (model.kind == ModelSpec::Kind::chain) {
    model.chain.validate();
  } else {
    std::vector<std::string> files{model.files.M, model.files.K, model.files.B};
    if (model.files.D) files.push_back(*model.files.D);
    if (model.files.C) files.push_back(*model.files.C);
    for (const auto& f : files) {
      if (!std::filesystem::exists(f)) throw ArgumentError("referenced file does not exist: " + f);
    }
  }
  static const std::set<std::string> known{"nlmm", "pod", "modal", "krylov", "identity"};
  if (methods.empty()) throw ArgumentError("at least one method is required");
  for (const auto& m : methods) {
    if (!known.count(m)) throw ArgumentError("unknown method '" + m + "'");
  }
  if (nlmm_rank < 1 || pod_rank < 1 || modal_rank < 1) throw ArgumentError("r values must be >= 1");
  if (pod_stride < 1) throw ArgumentError("pod stride must be >= 1");
  if (generator.snapshots < 1) throw ArgumentError("generator needs at least one snapshot");
  if (!(generator.window_end > generator.window_start)) throw ArgumentError("generator window must be non-empty");
  switch (generator.kind) {
    case GeneratorSpec::Kind::prescribed_sinusoid:
      if (generator.frequencies.empty()) throw ArgumentError("sinusoid generator needs frequencies");
      if (generator.amplitude == 0.0) throw ArgumentError("sinusoid generator amplitude must be non-zero");
      break;
    case GeneratorSpec::Kind::linear:
      if (generator.shifts.empty()) throw ArgumentError("linear generator needs shifts");
      break;
    case GeneratorSpec::Kind::zero:
      for (double q : generator.q0) {
        if (q == 0.0) throw ArgumentError("zero generator needs non-zero q0");
      }
      break;
  }
  if (std::find(methods.begin(), methods.end(), "krylov") != methods.end() && krylov_shifts.empty() &&
      generator.shifts.empty()) {
    throw ArgumentError("krylov method needs [krylov] shifts or linear generator shifts");
  }
  integrator.validate();
  if (!(training.duration > 0.0) || !(test.duration > 0.0)) throw ArgumentError("durations must be positive");
  if (discard_fraction < 0.0 || discard_fraction >= 1.0) throw ArgumentError("discard_fraction must be in [0, 1)");
}

RunManifest parse_manifest(const std::string& text, const std::string& base_dir, const std::string& source) {
  Sections s(text, source);
  RunManifest m;
  m.source = source;
  m.base_dir = base_dir;

  s.get("run.methods", m.methods);
  s.get("run.seed", m.seed);

  std::string kind = "chain";
  s.get("model.kind", kind);
  auto& c = m.model.chain;
  if (kind == "chain") {
    m.model.kind = ModelSpec::Kind::chain;
    c.seed = m.seed;
    s.get("model.n_masses", c.n_masses);
    s.get("model.mass", c.mass);
    s.get("model.k_lin", c.k_lin);
    s.get("model.k_quad", c.k_quad);
    s.get("model.k_cub", c.k_cub);
    s.get("model.cub_spread", c.cub_spread);
    s.get("model.seed", c.seed);
    s.get("model.input_node", c.input_node);
    s.get("model.output_node", c.output_node);
    const Entry* ra = s.find("model.rayleigh_alpha");
    const Entry* rb = s.find("model.rayleigh_beta");
    if (ra || rb) {
      RayleighSpec r;
      if (ra) r.alpha = s.convert<double>(*ra);
      if (rb) r.beta = s.convert<double>(*rb);
      c.rayleigh = r;
    }
  } else if (kind == "matrix-market") {
    m.model.kind = ModelSpec::Kind::matrix_market;
    auto required = [&](const std::string& key) {
      const Entry* e = s.find("model." + key);
      if (!e) throw ParseError(source + ": [model] kind = matrix-market requires '" + key + "'");
      return resolve(base_dir, e->value);
    };
    m.model.files.M = required("M");
    m.model.files.K = required("K");
    m.model.files.B = required("B");
    if (const Entry* e = s.find("model.D")) m.model.files.D = resolve(base_dir, e->value);
    if (const Entry* e = s.find("model.C")) m.model.files.C = resolve(base_dir, e->value);
  } else {
    const Entry* e = s.find("model.kind");
    s.fail(e->line, "unknown model kind '" + kind + "'");
  }

  auto& g = m.generator;
  std::string gkind = "prescribed-sinusoid";
  s.get("generator.kind", gkind);
  if (gkind == "prescribed-sinusoid") g.kind = GeneratorSpec::Kind::prescribed_sinusoid;
  else if (gkind == "linear") g.kind = GeneratorSpec::Kind::linear;
  else if (gkind == "zero") g.kind = GeneratorSpec::Kind::zero;
  else s.fail(s.find("generator.kind")->line, "unknown generator kind '" + gkind + "'");
  s.get("generator.amplitude", g.amplitude);
  s.get("generator.frequencies", g.frequencies);
  s.get("generator.force_gain", g.force_gain);
  s.get("generator.shifts", g.shifts);
  s.get("generator.q0", g.q0);
  s.get("generator.window_start", g.window_start);
  s.get("generator.window_end", g.window_end);
  s.get("generator.snapshots", g.snapshots);

  auto& n = m.nlmm;
  s.get("nlmm.rank", m.nlmm_rank);
  s.get("nlmm.newton_tol", n.newton.tol);
  s.get("nlmm.newton_max_iter", n.newton.max_iter);
  s.get("nlmm.max_halvings", n.newton.max_halvings);
  if (const Entry* e = s.find("nlmm.initial_guess")) {
    try {
      n.initial_guess = initial_guess_from_string(e->value);
    } catch (const Error& err) {
      s.fail(e->line, err.what());
    }
  }
  s.get("nlmm.orthogonalize_inline", n.orthogonalize_inline);
  s.get("nlmm.deflate", n.deflate);
  std::string defl = "fixed";
  s.get("nlmm.deflation", defl);
  if (defl == "fixed") n.deflation.kind = DeflationMode::Kind::fixed;
  else if (defl == "threshold") n.deflation.kind = DeflationMode::Kind::threshold;
  else s.fail(s.find("nlmm.deflation")->line, "deflation must be 'fixed' or 'threshold'");
  n.deflation.r_defl = m.nlmm_rank;
  s.get("nlmm.tau", n.deflation.tau);

  s.get("pod.rank", m.pod_rank);
  s.get("pod.stride", m.pod_stride);
  s.get("modal.rank", m.modal_rank);
  s.get("krylov.shifts", m.krylov_shifts);

  auto& ig = m.integrator;
  if (const Entry* e = s.find("integrator.rho_inf")) {
    ig.rho_inf = s.convert<double>(*e);
    m.rho_inf_given = true;
  }
  s.get("integrator.h", ig.h);
  s.get("integrator.newton_tol", ig.newton_tol);
  s.get("integrator.newton_max_iter", ig.newton_max_iter);

  s.get("training.amplitude", m.training.amplitude);
  s.get("training.frequency", m.training.frequency);
  s.get("training.duration", m.training.duration);
  s.get("test.amplitude", m.test.amplitude);
  s.get("test.frequency", m.test.frequency);
  s.get("test.duration", m.test.duration);
  s.get("test.discard_fraction", m.discard_fraction);

  if (const Entry* e = s.find("output.dir")) m.output_dir = resolve(base_dir, e->value);
  else m.output_dir = resolve(base_dir, m.output_dir);
  s.get("output.export_rom", m.export_rom);

  s.check_all_used();
  m.validate();
  return m;
}

RunManifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open manifest '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  auto base = std::filesystem::path(path).parent_path().string();
  if (base.empty()) base = ".";
  return parse_manifest(buf.str(), base, path);
}

}  // namespace somor
