#include "run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace subscat::cli {

namespace {

std::string where(const std::string& key, int line) {
  std::string s = key.empty() ? "config" : key;
  if (line > 0) s += " (line " + std::to_string(line) + ")";
  return s;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

struct Entry {
  std::string value;
  int line;
};

class Reader {
 public:
  Reader(std::string section, std::map<std::string, Entry> entries)
      : section_(std::move(section)), entries_(std::move(entries)) {}

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  std::string name(const std::string& key) const { return "[" + section_ + "] " + key; }
  int line(const std::string& key) const { return has(key) ? entries_.at(key).line : 0; }

  double number(const std::string& key, std::string_view text, int line) const {
    double v = 0.0;
    const auto* begin = text.data();
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (text.empty() || ec != std::errc{} || ptr != end)
      throw ConfigError(name(key), line, "expected a number, got '" + std::string(text) + "'");
    if (!std::isfinite(v)) throw ConfigError(name(key), line, "value must be finite");
    return v;
  }

  double number(const std::string& key) const { return number(key, entries_.at(key).value, line(key)); }

  std::size_t count(const std::string& key) const {
    const double v = number(key);
    if (v < 0.0 || v != std::floor(v) || v > 1e9)
      throw ConfigError(name(key), line(key), "expected a non-negative integer");
    return static_cast<std::size_t>(v);
  }

  std::string word(const std::string& key) const { return entries_.at(key).value; }

  std::vector<double> list(const std::string& key) const {
    std::vector<double> out;
    for (auto item : split(entries_.at(key).value, ',')) out.push_back(number(key, item, line(key)));
    return out;
  }

  std::vector<WidthHeight> pairs(const std::string& key) const {
    std::vector<WidthHeight> out;
    for (auto item : split(entries_.at(key).value, ',')) {
      std::istringstream fields{std::string(item)};
      std::string w, h, extra;
      fields >> w >> h;
      if (w.empty() || h.empty() || (fields >> extra))
        throw ConfigError(name(key), line(key), "expected 'width height' pairs, got '" + std::string(item) + "'");
      out.push_back({number(key, w, line(key)), number(key, h, line(key))});
    }
    return out;
  }

 private:
  std::string section_;
  std::map<std::string, Entry> entries_;
};

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"barrier", {"kind", "a", "b", "height", "half_profile", "segments"}},
      {"packet", {"x0", "sigma", "k0", "k_points"}},
      {"run",
       {"k_min", "k_max", "k_count", "times", "dx", "omega_ladder", "oracle_dx", "oracle_dt", "points_per_wavelength",
        "tol_unitarity", "tol_decomposition", "tol_norm", "tol_sum", "tol_overlap", "tol_route", "tol_oracle_l2",
        "tol_numerov", "tol_clock"}},
  };
  return keys;
}

void require_positive(const Reader& r, const std::string& key, double v) {
  if (!(v > 0.0)) throw ConfigError(r.name(key), r.line(key), "must be positive");
}

}  // namespace

ConfigError::ConfigError(std::string key, int line, const std::string& message)
    : std::runtime_error(where(key, line) + ": " + message), key_(std::move(key)), line_(line) {}

void Tolerances::scale(double factor) {
  for (double* t : {&unitarity, &decomposition, &norm, &sum, &overlap, &route, &oracle_l2, &numerov, &clock})
    *t *= factor;
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

RunConfig parse_config(std::string_view text) {
  std::map<std::string, std::map<std::string, Entry>> sections;
  std::string current;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    const auto comment = raw.find_first_of("#;");
    const std::string_view line = trim(raw.substr(0, comment));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("", line_no, "malformed section header");
      current = std::string(trim(line.substr(1, line.size() - 2)));
      if (!known_keys().count(current)) throw ConfigError("[" + current + "]", line_no, "unknown section");
      if (sections.count(current)) throw ConfigError("[" + current + "]", line_no, "duplicate section");
      sections[current];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("", line_no, "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (current.empty()) throw ConfigError(key, line_no, "key outside of any section");
    const std::string full = "[" + current + "] " + key;
    if (!known_keys().at(current).count(key)) throw ConfigError(full, line_no, "unknown key");
    if (sections[current].count(key)) throw ConfigError(full, line_no, "duplicate key");
    if (value.empty()) throw ConfigError(full, line_no, "missing value");
    sections[current][key] = {value, line_no};
  }

  RunConfig cfg;
  cfg.text = std::string(text);
  cfg.hash = fnv1a(text);

  if (!sections.count("barrier")) throw ConfigError("[barrier]", 0, "section is required");
  {
    const Reader r("barrier", sections["barrier"]);
    BarrierConfig& b = cfg.barrier;
    if (r.has("kind")) b.kind = r.word("kind");
    if (r.has("a")) b.a = r.number("a");
    if (b.kind == "rectangular") {
      for (const char* k : {"b", "height"})
        if (!r.has(k)) throw ConfigError(r.name(k), 0, "required for kind = rectangular");
      for (const char* k : {"half_profile", "segments"})
        if (r.has(k)) throw ConfigError(r.name(k), r.line(k), "not used by kind = rectangular");
      b.b = r.number("b");
      b.height = r.number("height");
      if (!(b.b > b.a)) throw ConfigError(r.name("b"), r.line("b"), "must exceed a (width must be positive)");
    } else if (b.kind == "symmetric" || b.kind == "segments") {
      const std::string key = b.kind == "symmetric" ? "half_profile" : "segments";
      if (!r.has(key)) throw ConfigError(r.name(key), 0, "required for kind = " + b.kind);
      for (const char* k : {"b", "height", b.kind == "symmetric" ? "segments" : "half_profile"})
        if (r.has(k)) throw ConfigError(r.name(k), r.line(k), "not used by kind = " + b.kind);
      b.profile = r.pairs(key);
      for (const auto& p : b.profile)
        if (!(p.width > 0.0)) throw ConfigError(r.name(key), r.line(key), "every width must be positive");
      if (b.kind == "segments") {
        const auto& p = b.profile;
        for (std::size_t i = 0; i < p.size(); ++i) {
          const auto& q = p[p.size() - 1 - i];
          if (p[i].height != q.height || std::abs(p[i].width - q.width) > 1e-12 * std::max(p[i].width, q.width))
            throw ConfigError(r.name(key), r.line(key), "segment list must be mirror symmetric");
        }
      }
    } else {
      throw ConfigError(r.name("kind"), r.line("kind"), "expected rectangular, symmetric or segments");
    }
  }

  if (sections.count("packet")) {
    const Reader r("packet", sections["packet"]);
    PacketConfig p;
    for (const char* k : {"x0", "sigma", "k0"})
      if (!r.has(k)) throw ConfigError(r.name(k), 0, "required in [packet]");
    p.x0 = r.number("x0");
    p.sigma = r.number("sigma");
    p.k0 = r.number("k0");
    require_positive(r, "sigma", p.sigma);
    require_positive(r, "k0", p.k0);
    if (r.has("k_points")) {
      p.k_points = r.count("k_points");
      if (p.k_points < 16) throw ConfigError(r.name("k_points"), r.line("k_points"), "at least 16 required");
    }
    cfg.packet = p;
  }

  if (sections.count("run")) {
    const Reader r("run", sections["run"]);
    RunParams& run = cfg.run;
    const int grid_keys = r.has("k_min") + r.has("k_max") + r.has("k_count");
    if (grid_keys != 0 && grid_keys != 3)
      throw ConfigError("[run] k_min/k_max/k_count", 0, "all three are required together");
    if (grid_keys == 3) {
      run.k_min = r.number("k_min");
      run.k_max = r.number("k_max");
      run.k_count = r.count("k_count");
      require_positive(r, "k_min", run.k_min);
      if (!(run.k_max >= run.k_min)) throw ConfigError(r.name("k_max"), r.line("k_max"), "must be >= k_min");
      if (run.k_count < 1) throw ConfigError(r.name("k_count"), r.line("k_count"), "must be at least 1");
      if (run.k_count > 1 && run.k_max == run.k_min)
        throw ConfigError(r.name("k_max"), r.line("k_max"), "must exceed k_min when k_count > 1");
      cfg.has_k_grid = true;
    }
    if (r.has("times")) {
      run.times = r.list("times");
      for (std::size_t i = 1; i < run.times.size(); ++i)
        if (!(run.times[i] > run.times[i - 1]))
          throw ConfigError(r.name("times"), r.line("times"), "must be strictly increasing");
      cfg.has_times = true;
    }
    for (const char* k : {"dx", "oracle_dx", "oracle_dt", "points_per_wavelength"}) {
      if (!r.has(k)) continue;
      const double v = r.number(k);
      require_positive(r, k, v);
      if (std::string(k) == "dx") run.dx = v;
      if (std::string(k) == "oracle_dx") run.oracle_dx = v;
      if (std::string(k) == "oracle_dt") run.oracle_dt = v;
      if (std::string(k) == "points_per_wavelength") run.points_per_wavelength = v;
    }
    if (r.has("omega_ladder")) {
      run.omega_ladder = r.list("omega_ladder");
      for (double w : run.omega_ladder)
        if (!(w > 0.0)) throw ConfigError(r.name("omega_ladder"), r.line("omega_ladder"), "entries must be positive");
      for (std::size_t i = 1; i < run.omega_ladder.size(); ++i)
        if (!(run.omega_ladder[i] < run.omega_ladder[i - 1]))
          throw ConfigError(r.name("omega_ladder"), r.line("omega_ladder"), "must be strictly decreasing");
    }
    Tolerances& t = cfg.tolerances;
    const std::pair<const char*, double*> tols[] = {
        {"tol_unitarity", &t.unitarity}, {"tol_decomposition", &t.decomposition}, {"tol_norm", &t.norm},
        {"tol_sum", &t.sum},             {"tol_overlap", &t.overlap},             {"tol_route", &t.route},
        {"tol_oracle_l2", &t.oracle_l2}, {"tol_numerov", &t.numerov},             {"tol_clock", &t.clock}};
    for (const auto& [key, dst] : tols) {
      if (!r.has(key)) continue;
      *dst = r.number(key);
      require_positive(r, key, *dst);
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path, 0, "cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void validate_for(const RunConfig& cfg, Command command) {
  switch (command) {
    case Command::solve:
    case Command::decompose:
      if (!cfg.has_k_grid) throw ConfigError("[run] k_min/k_max/k_count", 0, "k-grid required for this command");
      break;
    case Command::evolve:
      if (!cfg.packet) throw ConfigError("[packet]", 0, "section required for evolve");
      if (!cfg.has_times || cfg.run.times.empty()) throw ConfigError("[run] times", 0, "required for evolve");
      break;
    case Command::times:
      if (!cfg.packet) throw ConfigError("[packet]", 0, "section required for times");
      break;
    case Command::larmor:
      if (!cfg.packet) throw ConfigError("[packet]", 0, "section required for larmor");
      if (cfg.run.omega_ladder.size() < 2)
        throw ConfigError("[run] omega_ladder", 0, "at least two field strengths are required");
      break;
  }
}

}  // namespace subscat::cli
