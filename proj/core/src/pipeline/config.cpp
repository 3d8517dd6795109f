#include "caloric/pipeline/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <variant>

namespace caloric::pipeline {

namespace {

struct Value {
  enum class Kind { Number, Bool, String, List } kind = Kind::String;
  double number = 0.0;
  bool integral = false;
  bool boolean = false;
  std::string text;
  std::vector<Value> items;
};

[[noreturn]] void fail(int line, const std::string& what) {
  throw ConfigError("config", "line " + std::to_string(line) + ": " + what);
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Drops a trailing comment outside quotes.
std::string_view strip_comment(std::string_view s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

Value parse_scalar(std::string_view s, int line) {
  Value v;
  if (s.empty()) fail(line, "missing value");
  if (s.front() == '"') {
    if (s.size() < 2 || s.back() != '"') fail(line, "unterminated string");
    v.text = std::string(s.substr(1, s.size() - 2));
    return v;
  }
  if (s == "true" || s == "false") {
    v.kind = Value::Kind::Bool;
    v.boolean = s == "true";
    return v;
  }
  double number = 0.0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, number);
  if (ec == std::errc() && ptr == end) {
    v.kind = Value::Kind::Number;
    v.number = number;
    v.integral = s.find_first_of(".eE") == std::string_view::npos;
    return v;
  }
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' || c == '/')) {
      fail(line, "malformed value '" + std::string(s) + "'");
    }
  }
  v.text = std::string(s);
  return v;
}

Value parse_value(std::string_view s, int line) {
  if (s.empty() || s.front() != '[') return parse_scalar(s, line);
  if (s.back() != ']') fail(line, "unterminated list");
  Value v;
  v.kind = Value::Kind::List;
  std::string_view body = trim(s.substr(1, s.size() - 2));
  while (!body.empty()) {
    const auto comma = body.find(',');
    v.items.push_back(parse_scalar(trim(body.substr(0, comma)), line));
    if (comma == std::string_view::npos) break;
    body = trim(body.substr(comma + 1));
    if (body.empty()) fail(line, "trailing comma in list");
  }
  return v;
}

struct Context {
  std::string key;
  int line;
};

[[noreturn]] void out_of_range(const Context& c, const std::string& rule) {
  fail(c.line, "value out of range for '" + c.key + "': " + rule);
}

double as_number(const Value& v, const Context& c) {
  if (v.kind != Value::Kind::Number) fail(c.line, "'" + c.key + "' expects a number");
  if (!std::isfinite(v.number)) out_of_range(c, "must be finite");
  return v.number;
}

int as_int(const Value& v, const Context& c) {
  const double x = as_number(v, c);
  if (!v.integral || x < -2147483648.0 || x > 2147483647.0) fail(c.line, "'" + c.key + "' expects an integer");
  return static_cast<int>(x);
}

bool as_bool(const Value& v, const Context& c) {
  if (v.kind != Value::Kind::Bool) fail(c.line, "'" + c.key + "' expects true or false");
  return v.boolean;
}

std::string as_string(const Value& v, const Context& c) {
  if (v.kind != Value::Kind::String) fail(c.line, "'" + c.key + "' expects a string");
  return v.text;
}

const std::vector<Value>& as_list(const Value& v, const Context& c) {
  if (v.kind != Value::Kind::List) fail(c.line, "'" + c.key + "' expects a list");
  return v.items;
}

double positive(const Value& v, const Context& c) {
  const double x = as_number(v, c);
  if (!(x > 0.0)) out_of_range(c, "must be > 0");
  return x;
}

double nonnegative(const Value& v, const Context& c) {
  const double x = as_number(v, c);
  if (x < 0.0) out_of_range(c, "must be >= 0");
  return x;
}

int int_in(const Value& v, const Context& c, int lo, int hi) {
  const int x = as_int(v, c);
  if (x < lo || x > hi) out_of_range(c, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return x;
}

using Setter = std::function<void(RunConfig&, const Value&, const Context&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"target",
       [](RunConfig& r, const Value& v, const Context& c) {
         try {
           r.target = target::parse_target_kind(as_string(v, c));
         } catch (const ConfigError&) {
           throw;
         } catch (const Error&) {
           fail(c.line, "unknown target '" + v.text + "' (valid: sphere2 | flat_torus2 | sphere_product)");
         }
       }},
      {"flow",
       [](RunConfig& r, const Value& v, const Context& c) {
         const std::string s = as_string(v, c);
         if (s == "heat") r.flow = Flow::Heat;
         else if (s == "sl") r.flow = Flow::SL;
         else if (s == "gauge") r.flow = Flow::Gauge;
         else if (s == "full") r.flow = Flow::Full;
         else fail(c.line, "unknown flow '" + s + "' (valid: heat | sl | gauge | full)");
       }},
      {"output",
       [](RunConfig& r, const Value& v, const Context& c) {
         r.output = as_string(v, c);
         if (r.output.empty()) out_of_range(c, "must not be empty");
       }},
      {"threads", [](RunConfig& r, const Value& v, const Context& c) { r.threads = int_in(v, c, 1, 256); }},

      {"grid.n",
       [](RunConfig& r, const Value& v, const Context& c) {
         const int n = int_in(v, c, 8, 4096);
         if ((n & (n - 1)) != 0) out_of_range(c, "must be a power of two");
         r.grid.n = n;
       }},
      {"grid.L", [](RunConfig& r, const Value& v, const Context& c) { r.grid.side_length = positive(v, c); }},

      {"initial.family",
       [](RunConfig& r, const Value& v, const Context& c) {
         const std::string s = as_string(v, c);
         static const std::set<std::string> valid{"constant", "bump", "shell", "helix", "random"};
         if (!valid.count(s)) fail(c.line, "unknown family '" + s + "' (valid: constant | bump | shell | helix | random)");
         r.initial.family = s;
       }},
      {"initial.amplitude", [](RunConfig& r, const Value& v, const Context& c) { r.initial.amplitude = nonnegative(v, c); }},
      {"initial.grad_norm", [](RunConfig& r, const Value& v, const Context& c) { r.initial.grad_norm = positive(v, c); }},
      {"initial.width", [](RunConfig& r, const Value& v, const Context& c) { r.initial.width = positive(v, c); }},
      {"initial.center",
       [](RunConfig& r, const Value& v, const Context& c) {
         const auto& items = as_list(v, c);
         if (items.size() != 2) out_of_range(c, "needs two coordinates");
         for (int a = 0; a < 2; ++a) r.initial.center[a] = nonnegative(items[a], c);
       }},
      {"initial.scales", [](RunConfig& r, const Value& v, const Context& c) { r.initial.scales = int_in(v, c, 1, 8); }},
      {"initial.shell", [](RunConfig& r, const Value& v, const Context& c) { r.initial.shell = int_in(v, c, 0, 12); }},
      {"initial.helix_theta",
       [](RunConfig& r, const Value& v, const Context& c) {
         const double x = as_number(v, c);
         if (!(x >= 0.0 && x <= 3.141592653589793)) out_of_range(c, "must lie in [0, pi]");
         r.initial.helix_theta = x;
       }},
      {"initial.helix_k", [](RunConfig& r, const Value& v, const Context& c) { r.initial.helix_k = int_in(v, c, 1, 1024); }},
      {"initial.seed",
       [](RunConfig& r, const Value& v, const Context& c) {
         r.initial.seed = static_cast<std::uint64_t>(int_in(v, c, 0, 2147483647));
       }},
      {"initial.smoothing", [](RunConfig& r, const Value& v, const Context& c) { r.initial.smoothing = nonnegative(v, c); }},

      {"heat.s_max", [](RunConfig& r, const Value& v, const Context& c) { r.heat.options.s_max = positive(v, c); }},
      {"heat.tol_q", [](RunConfig& r, const Value& v, const Context& c) { r.heat.options.tol_q = positive(v, c); }},
      {"heat.level_ratio",
       [](RunConfig& r, const Value& v, const Context& c) {
         const double x = as_number(v, c);
         if (!(x > 1.0 && x <= 4.0)) out_of_range(c, "must lie in (1, 4]");
         r.heat.options.level_ratio = x;
       }},
      {"heat.ramp_step", [](RunConfig& r, const Value& v, const Context& c) { r.heat.options.ramp_step = positive(v, c); }},
      {"heat.min_substeps",
       [](RunConfig& r, const Value& v, const Context& c) { r.heat.options.min_substeps = int_in(v, c, 1, 1000); }},
      {"heat.max_substep",
       [](RunConfig& r, const Value& v, const Context& c) { r.heat.options.max_substep = positive(v, c); }},
      {"heat.energy_threshold",
       [](RunConfig& r, const Value& v, const Context& c) { r.heat.options.energy_threshold = positive(v, c); }},
      {"heat.enforce_smallness",
       [](RunConfig& r, const Value& v, const Context& c) { r.heat.options.enforce_smallness = as_bool(v, c); }},
      {"heat.dump_levels", [](RunConfig& r, const Value& v, const Context& c) { r.heat.dump_levels = as_bool(v, c); }},

      {"sl.T", [](RunConfig& r, const Value& v, const Context& c) { r.sl.T = positive(v, c); }},
      {"sl.dt", [](RunConfig& r, const Value& v, const Context& c) { r.sl.dt = positive(v, c); }},
      {"sl.record_every",
       [](RunConfig& r, const Value& v, const Context& c) { r.sl.record_every = int_in(v, c, 1, 1000000); }},
      {"sl.dump_every", [](RunConfig& r, const Value& v, const Context& c) { r.sl.dump_every = int_in(v, c, 0, 1000000); }},

      {"gauge.separation", [](RunConfig& r, const Value& v, const Context& c) { r.gauge.separation = as_bool(v, c); }},
      {"gauge.tail_ratio",
       [](RunConfig& r, const Value& v, const Context& c) {
         const double x = positive(v, c);
         if (x >= 1.0) out_of_range(c, "must lie in (0, 1)");
         r.gauge.tail_ratio = x;
       }},
      {"gauge.dump", [](RunConfig& r, const Value& v, const Context& c) { r.gauge.dump = as_bool(v, c); }},

      {"diagnostics.envelopes",
       [](RunConfig& r, const Value& v, const Context& c) { r.diagnostics.envelopes = as_bool(v, c); }},
      {"diagnostics.sigma",
       [](RunConfig& r, const Value& v, const Context& c) {
         r.diagnostics.sigma.clear();
         for (const auto& item : as_list(v, c)) {
           const double x = as_number(item, c);
           try {
             diagnostics::sigma_index(x);
           } catch (const Error&) {
             out_of_range(c, "sigma must be a multiple of 1/8 in [0, 2]");
           }
           r.diagnostics.sigma.push_back(x);
         }
       }},
      {"diagnostics.delta",
       [](RunConfig& r, const Value& v, const Context& c) {
         const double x = positive(v, c);
         if (x > 1.0) out_of_range(c, "must lie in (0, 1]");
         r.diagnostics.delta = x;
       }},
      {"diagnostics.iterates",
       [](RunConfig& r, const Value& v, const Context& c) { r.diagnostics.iterates = int_in(v, c, 0, 4); }},
      {"diagnostics.decay_fits",
       [](RunConfig& r, const Value& v, const Context& c) { r.diagnostics.decay_fits = as_bool(v, c); }},
      {"diagnostics.fit_shells",
       [](RunConfig& r, const Value& v, const Context& c) {
         r.diagnostics.fit_shells.clear();
         for (const auto& item : as_list(v, c)) r.diagnostics.fit_shells.push_back(int_in(item, c, 0, 12));
       }},
      {"diagnostics.fit_weight",
       [](RunConfig& r, const Value& v, const Context& c) { r.diagnostics.fit_weight = nonnegative(v, c); }},
      {"diagnostics.residuals",
       [](RunConfig& r, const Value& v, const Context& c) { r.diagnostics.residuals = as_bool(v, c); }},
      {"diagnostics.residual_sample",
       [](RunConfig& r, const Value& v, const Context& c) {
         r.diagnostics.residual_sample = int_in(v, c, 1, 100000000);
       }},
  };
  return table;
}

}  // namespace

std::string_view to_string(Flow flow) noexcept {
  switch (flow) {
    case Flow::Heat: return "heat";
    case Flow::SL: return "sl";
    case Flow::Gauge: return "gauge";
    case Flow::Full: return "full";
  }
  return "full";
}

RunConfig parse_config(std::string_view text) {
  static const std::set<std::string> sections{"grid", "initial", "heat", "sl", "gauge", "diagnostics"};
  RunConfig config;
  std::string section;
  std::set<std::string> seen;
  int line_no = 0;
  int last_line = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const std::string_view line = trim(strip_comment(raw));
    if (line.empty()) continue;
    last_line = line_no;
    if (line.front() == '[') {
      if (line.back() != ']') fail(line_no, "malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (!sections.count(section)) fail(line_no, "unknown section '" + section + "'");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(line_no, "expected key = value");
    const std::string name(trim(line.substr(0, eq)));
    if (name.empty()) fail(line_no, "missing key");
    const std::string key = section.empty() ? name : section + "." + name;
    const auto it = setters().find(key);
    if (it == setters().end()) fail(line_no, "unknown key '" + key + "'");
    if (!seen.insert(key).second) fail(line_no, "repeated key '" + key + "'");
    it->second(config, parse_value(trim(line.substr(eq + 1)), line_no), Context{key, line_no});
  }
  for (const char* required : {"target", "grid.n", "initial.family"}) {
    if (!seen.count(required)) fail(last_line + 1, "missing required key '" + std::string(required) + "'");
  }
  if (config.target != target::TargetKind::Sphere2 && config.initial.family == "helix") {
    throw ConfigError("config", "initial.family = helix needs target = sphere2");
  }
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot read " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

}  // namespace caloric::pipeline
