#include "hmfloquet/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hmfloquet/drive.hpp"

namespace hmf {

namespace {

// Recursive descent over: expr = term {(+|-) term}; term = factor {(*|/) factor};
// factor = [+|-] (number | pi | '(' expr ')').
class ExprParser {
 public:
  explicit ExprParser(const std::string& s) : s_(s) {}

  double run() {
    const double x = expr();
    skip();
    if (pos_ != s_.size()) fail();
    if (!std::isfinite(x)) throw ConfigError("non-finite value: '" + s_ + "'");
    return x;
  }

 private:
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail() const { throw ConfigError("cannot parse number: '" + s_ + "'"); }

  double expr() {
    double x = term();
    for (;;) {
      if (eat('+')) x += term();
      else if (eat('-')) x -= term();
      else return x;
    }
  }
  double term() {
    double x = factor();
    for (;;) {
      if (eat('*')) x *= factor();
      else if (eat('/')) x /= factor();
      else return x;
    }
  }
  double factor() {
    if (eat('-')) return -factor();
    if (eat('+')) return factor();
    if (eat('(')) {
      const double x = expr();
      if (!eat(')')) fail();
      return x;
    }
    skip();
    if (s_.compare(pos_, 2, "pi") == 0) {
      pos_ += 2;
      return kPi;
    }
    const char* begin = s_.c_str() + pos_;
    char* end = nullptr;
    const double x = std::strtod(begin, &end);
    if (end == begin) fail();
    pos_ += static_cast<std::size_t>(end - begin);
    return x;
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError("bad boolean for " + key + ": '" + v + "'");
}

long parse_int(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long x = 0;
  try {
    x = std::stol(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty()) throw ConfigError("bad integer for " + key + ": '" + v + "'");
  return x;
}

}  // namespace

std::string to_string(Command c) {
  switch (c) {
    case Command::spectrum: return "spectrum";
    case Command::perturb: return "perturb";
    case Command::dynamics: return "dynamics";
    case Command::ramp: return "ramp";
    case Command::symmetry: return "symmetry";
    case Command::validate: return "validate";
  }
  return "?";
}

Command parse_command(const std::string& s) {
  for (Command c : {Command::spectrum, Command::perturb, Command::dynamics, Command::ramp, Command::symmetry,
                    Command::validate})
    if (to_string(c) == s) return c;
  throw ConfigError("unknown command '" + s + "'");
}

double parse_real(const std::string& text) { return ExprParser(text).run(); }

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Range Range::parse(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (text.empty() || text.back() == ':') parts.push_back("");
  Range r;
  if (parts.size() == 1) {
    r = single(parse_real(parts[0]));
  } else if (parts.size() == 3) {
    r = {parse_real(parts[0]), parse_real(parts[1]), parse_real(parts[2])};
  } else {
    throw ConfigError("range must be 'value' or 'start:stop:step': '" + text + "'");
  }
  (void)r.values();
  return r;
}

std::vector<double> Range::values() const {
  if (step == 0.0) {
    if (start != stop) throw ConfigError("zero step in a non-trivial range");
    return {start};
  }
  const double span = (stop - start) / step;
  if (span < -1e-9) throw ConfigError("empty range: step points away from stop");
  const long n = static_cast<long>(std::floor(span + 1e-9)) + 1;
  if (n > 1000000) throw ConfigError("range has too many points");
  std::vector<double> out(n);
  for (long k = 0; k < n; ++k) out[k] = start + k * step;
  return out;
}

std::string Range::to_string() const {
  if (step == 0.0) return format_real(start);
  return format_real(start) + ":" + format_real(stop) + ":" + format_real(step);
}

void RunConfig::check() const {
  if (!(v > 0.0)) throw ConfigError("v must be positive");
  if (!(omega > 0.0)) throw ConfigError("omega must be positive");
  if (!std::isfinite(f)) throw ConfigError("f must be finite");
  for (double c : chi.values())
    if (!(c >= 0.0)) throw ConfigError("chi must be >= 0");
  (void)a_over_omega.values();
  (void)phi.values();
  if (cutoff < 1) throw ConfigError("N must be >= 1");
  if (!(tol > 0.0)) throw ConfigError("tol must be positive");
  if (max_iter < 1) throw ConfigError("max-iter must be >= 1");
  if (!(damping > 0.0 && damping <= 1.0)) throw ConfigError("damping must lie in (0, 1]");
  if (!(dt >= 0.0)) throw ConfigError("dt must be positive (0 selects T/500)");
  if (!std::isfinite(t_end) || t_end == 0.0) throw ConfigError("t-end must be finite and nonzero");
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be >= 0");
  if (!(t_f >= 0.0)) throw ConfigError("tf must be >= 0");
  if (!(dt_avg > 0.0)) throw ConfigError("dt-avg must be positive");
  if (initial != "1" && initial != "2" && initial != "ground") throw ConfigError("initial must be 1, 2 or ground");
}

KeyValues parse_key_values(const std::string& text) {
  KeyValues kv;
  std::stringstream ss(text);
  int line_no = 0;
  for (std::string line; std::getline(ss, line);) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

KeyValues read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_key_values(buf.str());
}

KeyValues standard_preset() {
  return {{"f", "0.25"}, {"omega", "10"}, {"v", "1"},      {"chi", "0.4"},
          {"alpha", "0.01"}, {"tf", "2400"}, {"dt-avg", "400"}};
}

KeyValues merge(KeyValues base, const KeyValues& overrides) {
  for (const auto& [k, v] : overrides) base[k] = v;
  return base;
}

RunConfig config_from_key_values(const KeyValues& kv) {
  RunConfig c;
  for (const auto& [key, val] : kv) {
    if (key == "command") c.command = parse_command(val);
    else if (key == "v") c.v = parse_real(val);
    else if (key == "omega") c.omega = parse_real(val);
    else if (key == "f") c.f = parse_real(val);
    else if (key == "A-over-omega") c.a_over_omega = Range::parse(val);
    else if (key == "phi") c.phi = Range::parse(val);
    else if (key == "chi") c.chi = Range::parse(val);
    else if (key == "N") c.cutoff = static_cast<int>(parse_int(key, val));
    else if (key == "tol") c.tol = parse_real(val);
    else if (key == "max-iter") c.max_iter = static_cast<int>(parse_int(key, val));
    else if (key == "damping") c.damping = parse_real(val);
    else if (key == "dt") c.dt = parse_real(val);
    else if (key == "t-end") c.t_end = parse_real(val);
    else if (key == "alpha") c.alpha = parse_real(val);
    else if (key == "tf") c.t_f = parse_real(val);
    else if (key == "dt-avg") c.dt_avg = parse_real(val);
    else if (key == "initial") c.initial = val;
    else if (key == "out") c.out = val;
    else if (key == "json") c.json = parse_bool(key, val);
    else if (key == "validate") c.validate = parse_bool(key, val);
    else if (key == "trajectories") c.trajectories = parse_bool(key, val);
    else if (key == "threads") {
      const long t = parse_int(key, val);
      if (t < 0) throw ConfigError("threads must be >= 0");
      c.threads = static_cast<unsigned>(t);
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  c.check();
  return c;
}

KeyValues config_to_key_values(const RunConfig& c) {
  const auto b = [](bool x) { return std::string(x ? "true" : "false"); };
  return {{"command", to_string(c.command)},
          {"v", format_real(c.v)},
          {"omega", format_real(c.omega)},
          {"f", format_real(c.f)},
          {"A-over-omega", c.a_over_omega.to_string()},
          {"phi", c.phi.to_string()},
          {"chi", c.chi.to_string()},
          {"N", std::to_string(c.cutoff)},
          {"tol", format_real(c.tol)},
          {"max-iter", std::to_string(c.max_iter)},
          {"damping", format_real(c.damping)},
          {"dt", format_real(c.dt)},
          {"t-end", format_real(c.t_end)},
          {"alpha", format_real(c.alpha)},
          {"tf", format_real(c.t_f)},
          {"dt-avg", format_real(c.dt_avg)},
          {"initial", c.initial},
          {"out", c.out},
          {"json", b(c.json)},
          {"validate", b(c.validate)},
          {"trajectories", b(c.trajectories)},
          {"threads", std::to_string(c.threads)}};
}

std::string serialize_config(const RunConfig& c) {
  std::string s;
  for (const auto& [k, v] : config_to_key_values(c)) s += k + "=" + v + "\n";
  return s;
}

RunConfig parse_config(const std::string& text) { return config_from_key_values(parse_key_values(text)); }

}  // namespace hmf
