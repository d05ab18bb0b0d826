#include "ss2d/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>
#include <functional>
#include <sstream>

#include "ss2d/csv.hpp"
#include "ss2d/error.hpp"
#include "ss2d/hash.hpp"

namespace ss2d::config {

namespace {

struct Field {
  std::string key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string quoted(const std::string& s) { return "\"" + s + "\""; }

double parse_double(const std::string& key, const std::string& v) {
  try {
    return csv::to_double(v);
  } catch (const Error&) {
    fail(ErrorCategory::Validation, key + ": expected a number, got '" + v + "'");
  }
}

long long parse_int(const std::string& key, const std::string& v) {
  try {
    return csv::to_int(v);
  } catch (const Error&) {
    fail(ErrorCategory::Validation, key + ": expected an integer, got '" + v + "'");
  }
}

std::vector<std::string> parse_list(const std::string& key, std::string v) {
  v = trim(v);
  if (!v.empty() && v.front() == '[') {
    if (v.back() != ']') fail(ErrorCategory::Validation, key + ": unterminated array");
    v = v.substr(1, v.size() - 2);
  }
  std::vector<std::string> out;
  if (trim(v).empty()) return out;
  for (auto part : csv::split(v)) out.push_back(trim(part));
  return out;
}

std::vector<std::size_t> parse_widths(const std::string& key, const std::string& v) {
  std::vector<std::size_t> out;
  for (const auto& item : parse_list(key, v)) {
    const long long n = parse_int(key, item);
    if (n <= 0) fail(ErrorCategory::Validation, key + ": layer widths must be positive");
    out.push_back(static_cast<std::size_t>(n));
  }
  return out;
}

std::string widths_text(const std::vector<std::size_t>& w) {
  std::string s = "[";
  for (std::size_t i = 0; i < w.size(); ++i) s += (i ? ", " : "") + std::to_string(w[i]);
  return s + "]";
}

template <typename Ref>
Field real_field(std::string key, Ref ref) {
  return {key, [ref](const RunConfig& c) { return csv::fmt(ref(c)); },
          [ref, key](RunConfig& c, const std::string& v) { ref(c) = parse_double(key, v); }};
}

template <typename T, typename Ref>
Field int_field(std::string key, Ref ref) {
  return {key, [ref](const RunConfig& c) { return std::to_string(ref(c)); },
          [ref, key](RunConfig& c, const std::string& v) { ref(c) = static_cast<T>(parse_int(key, v)); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back(int_field<int>("sim.episode_len", [](auto& c) -> auto& { return c.data.sim.kinematics.episode_len; }));
    f.push_back(real_field("sim.player_decay", [](auto& c) -> auto& { return c.data.sim.kinematics.player_decay; }));
    f.push_back(real_field("sim.ball_decay", [](auto& c) -> auto& { return c.data.sim.kinematics.ball_decay; }));
    f.push_back(real_field("sim.player_speed_max",
                           [](auto& c) -> auto& { return c.data.sim.kinematics.player_speed_max; }));
    f.push_back(real_field("sim.ball_speed_max",
                           [](auto& c) -> auto& { return c.data.sim.kinematics.ball_speed_max; }));
    f.push_back(real_field("sim.player_accel_max",
                           [](auto& c) -> auto& { return c.data.sim.kinematics.player_accel_max; }));
    f.push_back(real_field("sim.ball_accel_max",
                           [](auto& c) -> auto& { return c.data.sim.kinematics.ball_accel_max; }));

    f.push_back(real_field("policy.kickable_dist", [](auto& c) -> auto& { return c.data.sim.policy.kickable_dist; }));
    f.push_back(real_field("policy.max_turn_deg", [](auto& c) -> auto& { return c.data.sim.policy.max_turn_deg; }));
    f.push_back(int_field<int>("policy.roam_block", [](auto& c) -> auto& { return c.data.sim.policy.roam_block; }));
    f.push_back(real_field("policy.roam_prob", [](auto& c) -> auto& { return c.data.sim.policy.roam_prob; }));
    f.push_back(int_field<int>("policy.scan_block", [](auto& c) -> auto& { return c.data.sim.policy.scan_block; }));
    f.push_back(real_field("policy.scan_prob", [](auto& c) -> auto& { return c.data.sim.policy.scan_prob; }));
    f.push_back(real_field("policy.noise_scale", [](auto& c) -> auto& { return c.data.sim.policy.noise_scale; }));

    for (int i = 0; i < sim::kTeamSize; ++i) {
      const std::string key = "formation.l" + std::to_string(i + 1);
      f.push_back({key,
                   [i](const RunConfig& c) {
                     const Vec2 p = c.data.sim.formation[static_cast<std::size_t>(i)];
                     return "[" + csv::fmt(p.x) + ", " + csv::fmt(p.y) + "]";
                   },
                   [i, key](RunConfig& c, const std::string& v) {
                     const auto items = parse_list(key, v);
                     if (items.size() != 2) fail(ErrorCategory::Validation, key + ": expected [x, y]");
                     c.data.sim.formation[static_cast<std::size_t>(i)] = {parse_double(key, items[0]),
                                                                          parse_double(key, items[1])};
                   }});
    }

    f.push_back(real_field("sensor.dist_qstep", [](auto& c) -> auto& { return c.data.noise.dist_qstep; }));
    f.push_back(real_field("sensor.dist_outstep", [](auto& c) -> auto& { return c.data.noise.dist_outstep; }));
    f.push_back(
        real_field("sensor.visible_distance", [](auto& c) -> auto& { return c.data.noise.visible_distance; }));
    f.push_back({"sensor.view_policy",
                 [](const RunConfig& c) { return quoted(sensor::to_string(c.data.noise.view_policy.kind)); },
                 [](RunConfig& c, const std::string& v) { c.data.noise.view_policy.kind = sensor::parse_view_policy(v); }});
    f.push_back(
        real_field("sensor.narrow_below", [](auto& c) -> auto& { return c.data.noise.view_policy.narrow_below; }));
    f.push_back(
        real_field("sensor.normal_below", [](auto& c) -> auto& { return c.data.noise.view_policy.normal_below; }));

    f.push_back(int_field<int>("dataset.episodes", [](auto& c) -> auto& { return c.episodes; }));
    f.push_back(int_field<std::uint64_t>("dataset.seed", [](auto& c) -> auto& { return c.data_seed; }));
    f.push_back({"dataset.observer", [](const RunConfig& c) { return quoted(c.data.observer.to_string()); },
                 [](RunConfig& c, const std::string& v) { c.data.observer = sim::ObjectId::parse(v); }});
    f.push_back({"dataset.object", [](const RunConfig& c) { return quoted(c.data.object.to_string()); },
                 [](RunConfig& c, const std::string& v) { c.data.object = sim::ObjectId::parse(v); }});
    f.push_back(int_field<int>("dataset.warmup", [](auto& c) -> auto& { return c.data.warmup; }));
    f.push_back({"dataset.belief", [](const RunConfig& c) { return quoted(dataset::to_string(c.data.estimator)); },
                 [](RunConfig& c, const std::string& v) { c.data.estimator = dataset::parse_belief_estimator(v); }});

    f.push_back({"train.optimizer", [](const RunConfig& c) { return quoted(nn::to_string(c.train.optimizer)); },
                 [](RunConfig& c, const std::string& v) { c.train.optimizer = nn::parse_optimizer(v); }});
    f.push_back(real_field("train.learning_rate", [](auto& c) -> auto& { return c.train.learning_rate; }));
    f.push_back(int_field<std::size_t>("train.batch_size", [](auto& c) -> auto& { return c.train.batch_size; }));
    f.push_back(int_field<int>("train.epochs", [](auto& c) -> auto& { return c.train.epochs; }));
    f.push_back(int_field<std::uint64_t>("train.seed", [](auto& c) -> auto& { return c.train.seed; }));
    f.push_back(real_field("train.val_fraction", [](auto& c) -> auto& { return c.train.val_fraction; }));

    f.push_back({"model.dnn_layers", [](const RunConfig& c) { return widths_text(c.dnn.layers); },
                 [](RunConfig& c, const std::string& v) { c.dnn.layers = parse_widths("model.dnn_layers", v); }});
    f.push_back({"model.lstm_layers", [](const RunConfig& c) { return widths_text(c.lstm.layers); },
                 [](RunConfig& c, const std::string& v) { c.lstm.layers = parse_widths("model.lstm_layers", v); }});
    f.push_back({"model.lstm_head", [](const RunConfig& c) { return widths_text(c.lstm.head); },
                 [](RunConfig& c, const std::string& v) { c.lstm.head = parse_widths("model.lstm_head", v); }});

    f.push_back(int_field<int>("eval.max_pos_count", [](auto& c) -> auto& { return c.grid.max_pos_count; }));
    f.push_back(real_field("eval.dist_bin", [](auto& c) -> auto& { return c.grid.dist_bin; }));
    f.push_back(real_field("eval.max_dist", [](auto& c) -> auto& { return c.grid.max_dist; }));
    f.push_back(int_field<long long>("eval.min_samples", [](auto& c) -> auto& { return c.min_samples; }));
    f.push_back(
        int_field<int>("eval.summary_min_pos_count", [](auto& c) -> auto& { return c.summary_min_pos_count; }));
    return f;
  }();
  return table;
}

const Field& find_field(const std::string& key) {
  for (const auto& f : fields()) {
    if (f.key == key) return f;
  }
  fail(ErrorCategory::Validation, "unknown config key '" + key + "'");
}

std::string unquote(const std::string& v) {
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
  return v;
}

}  // namespace

void RunConfig::validate() const {
  data.sim.kinematics.validate();
  data.noise.validate();
  train.validate();
  dnn.validate();
  lstm.validate();
  if (dnn.kind != models::ModelKind::Dnn || lstm.kind != models::ModelKind::Lstm)
    fail(ErrorCategory::Validation, "model kinds are fixed per slot");
  if (episodes < 1) fail(ErrorCategory::Validation, "dataset.episodes must be at least 1");
  if (data.warmup < models::kWindow - 1)
    fail(ErrorCategory::Validation, "dataset.warmup must be at least " + std::to_string(models::kWindow - 1));
  if (data.observer == data.object) fail(ErrorCategory::Validation, "observer and object must differ");
  if (data.observer.is_ball()) fail(ErrorCategory::Validation, "the ball cannot observe");
  if (grid.max_pos_count < 0 || !(grid.dist_bin > 0) || !(grid.max_dist >= grid.dist_bin))
    fail(ErrorCategory::Validation, "invalid eval grid");
  if (min_samples < 1) fail(ErrorCategory::Validation, "eval.min_samples must be at least 1");
  if (data.sim.policy.roam_block < 1 || data.sim.policy.scan_block < 1)
    fail(ErrorCategory::Validation, "policy blocks must be at least 1 cycle");
}

KeyValues to_key_values(const RunConfig& cfg) {
  KeyValues out;
  for (const auto& f : fields()) out.emplace_back(f.key, f.get(cfg));
  return out;
}

void set_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  find_field(key).set(cfg, unquote(trim(value)));
}

std::vector<std::string> known_keys() {
  std::vector<std::string> out;
  for (const auto& f : fields()) out.push_back(f.key);
  return out;
}

KeyValues parse_toml(const std::string& text) {
  KeyValues out;
  std::istringstream is(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') in_string = !in_string;
      if (line[i] == '#' && !in_string) {
        line.resize(i);
        break;
      }
    }
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '[' && t.find('=') == std::string::npos) {
      if (t.back() != ']') fail(ErrorCategory::Format, "config line " + std::to_string(lineno) + ": bad section header");
      section = trim(std::string_view(t).substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) fail(ErrorCategory::Format, "config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(std::string_view(t).substr(0, eq));
    const std::string value = trim(std::string_view(t).substr(eq + 1));
    if (key.empty()) fail(ErrorCategory::Format, "config line " + std::to_string(lineno) + ": empty key");
    out.emplace_back(section.empty() ? key : section + "." + key, unquote(value));
  }
  return out;
}

std::string to_toml(const RunConfig& cfg) {
  std::string out;
  std::string section;
  for (const auto& [key, value] : to_key_values(cfg)) {
    const auto dot = key.find('.');
    const std::string sec = key.substr(0, dot);
    if (sec != section) {
      if (!section.empty()) out += "\n";
      out += "[" + sec + "]\n";
      section = sec;
    }
    out += key.substr(dot + 1) + " = " + value + "\n";
  }
  return out;
}

void apply_file(RunConfig& cfg, const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorCategory::Io, "cannot open config " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  try {
    for (const auto& [k, v] : parse_toml(ss.str())) set_value(cfg, k, v);
  } catch (const Error& e) {
    fail(e.category(), path + ": " + e.what());
  }
}

void apply_env(RunConfig& cfg, char** envp) {
  if (!envp) return;
  constexpr std::string_view prefix = "SS2D_";
  for (char** e = envp; *e; ++e) {
    const std::string_view entry(*e);
    if (entry.substr(0, prefix.size()) != prefix) continue;
    const auto eq = entry.find('=');
    if (eq == std::string_view::npos) continue;
    std::string name(entry.substr(prefix.size(), eq - prefix.size()));
    std::transform(name.begin(), name.end(), name.begin(), [](unsigned char ch) { return std::tolower(ch); });
    const auto us = name.find('_');
    if (us == std::string::npos) continue;
    name[us] = '.';
    const auto keys = known_keys();
    if (std::find(keys.begin(), keys.end(), name) == keys.end()) continue;
    try {
      set_value(cfg, name, std::string(entry.substr(eq + 1)));
    } catch (const Error& err) {
      fail(err.category(), "environment " + std::string(entry.substr(0, eq)) + ": " + err.what());
    }
  }
}

void apply_assignment(RunConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) fail(ErrorCategory::Usage, "expected key=value, got '" + assignment + "'");
  set_value(cfg, trim(std::string_view(assignment).substr(0, eq)), assignment.substr(eq + 1));
}

std::uint64_t config_hash(const RunConfig& cfg) { return fnv1a64(to_toml(cfg)); }

std::string provenance(const RunConfig& cfg, const std::string& artifact) {
  return "artifact=" + artifact + " config_hash=" + hex64(config_hash(cfg)) +
         " data_seed=" + std::to_string(cfg.data_seed) + " train_seed=" + std::to_string(cfg.train.seed);
}

}  // namespace ss2d::config
