#include "mbp/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mbp/error.hpp"

namespace mbp {

using nlohmann::json;

namespace {

// Reads keys out of one JSON object and complains about leftovers.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  ~Section() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError(path_ + ": unknown key '" + key + "'");
    }
  }

  template <typename T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception&) {
      throw ConfigError(path_ + "." + key + ": wrong type");
    }
  }

  const json* child(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  const std::string& path() const { return path_; }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_radio(const json& j, const std::string& path, RadioProfile& r) {
  Section s(j, path);
  s.read("tx_power_dbm", r.tx_power_dbm);
  s.read("noise_figure_db", r.noise_figure_db);
  s.read("array_side", r.array_side);
}

json radio_json(const RadioProfile& r) {
  return {{"tx_power_dbm", r.tx_power_dbm},
          {"noise_figure_db", r.noise_figure_db},
          {"array_side", r.array_side}};
}

template <typename F>
auto rethrow_as_config(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const InputError& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

void apply_overrides(const json& root, SimConfig& cfg) {
  Section s(root, "config");
  std::string ignored_preset;
  s.read("preset", ignored_preset);
  s.read("frames", cfg.frames);
  s.read("drops", cfg.drops);
  s.read("master_seed", cfg.master_seed);
  s.read("output_dir", cfg.output_dir);
  s.read("snapshot_stride", cfg.snapshot_stride);
  s.read("average_window", cfg.average_window);
  s.read("threads", cfg.threads);
  s.read("write_svg", cfg.write_svg);
  s.read("write_schedule_trace", cfg.write_schedule_trace);
  s.read("queue_snapshot_stride", cfg.queue_snapshot_stride);

  std::vector<std::string> models;
  s.read("models", models);
  if (s.child("models")) {
    cfg.models.clear();
    for (const auto& m : models) {
      cfg.models.push_back(rethrow_as_config("config.models", [&] {
        return constraint_model_from_string(m);
      }));
    }
  }
  std::string text;
  if (s.child("utility")) {
    s.read("utility", text);
    cfg.utility = rethrow_as_config("config.utility", [&] { return utility_from_string(text); });
  }
  if (s.child("arrival_law")) {
    s.read("arrival_law", text);
    cfg.arrival_law =
        rethrow_as_config("config.arrival_law", [&] { return arrival_law_from_string(text); });
  }
  if (s.child("solve_path")) {
    s.read("solve_path", text);
    cfg.solve_path =
        rethrow_as_config("config.solve_path", [&] { return solve_path_from_string(text); });
  }

  if (const json* v = s.child("v")) {
    Section vs(*v, "config.v");
    if (vs.child("value")) {
      cfg.v_rule.explicit_value = true;
      vs.read("value", cfg.v_rule.value);
    }
    if (vs.child("rmax_multiplier")) {
      if (cfg.v_rule.explicit_value) {
        throw ConfigError("config.v: give either 'value' or 'rmax_multiplier', not both");
      }
      vs.read("rmax_multiplier", cfg.v_rule.rmax_multiplier);
    }
  }

  if (const json* d = s.child("drop")) {
    Section ds(*d, "config.drop");
    ds.read("cell_radius_m", cfg.drop.cell_radius_m);
    ds.read("rn_distance_m", cfg.drop.rn_distance_m);
    ds.read("rn_count", cfg.drop.rn_count);
    ds.read("ue_count", cfg.drop.ue_count);
    ds.read("pathloss_threshold_db", cfg.drop.pathloss_threshold_db);
    ds.read("rotate_relays", cfg.drop.rotate_relays);
    ds.read("max_ue_retries", cfg.drop.max_ue_retries);
  }

  if (const json* c = s.child("channel")) {
    Section cs(*c, "config.channel");
    cs.read("carrier_hz", cfg.channel.carrier_hz);
    cs.read("bandwidth_hz", cfg.channel.bandwidth_hz);
    cs.read("frame_s", cfg.channel.frame_s);
    cs.read("alpha1", cfg.channel.alpha1);
    cs.read("alpha2_db", cfg.channel.alpha2_db);
    cs.read("thermal_noise_dbm_hz", cfg.channel.thermal_noise_dbm_hz);
    cs.read("cluster_rate", cfg.channel.cluster_rate);
    cs.read("paths_per_cluster", cfg.channel.paths_per_cluster);
    cs.read("angular_spread_mean_deg", cfg.channel.angular_spread_mean_deg);
    if (cs.child("fading_scale")) {
      std::string scale;
      cs.read("fading_scale", scale);
      cfg.channel.fading_scale = rethrow_as_config(
          "config.channel.fading_scale", [&] { return fading_scale_from_string(scale); });
    }
  }

  if (const json* r = s.child("radios")) {
    Section rs(*r, "config.radios");
    if (const json* b = rs.child("bs")) read_radio(*b, "config.radios.bs", cfg.radios.bs);
    if (const json* b = rs.child("rn")) read_radio(*b, "config.radios.rn", cfg.radios.rn);
    if (const json* b = rs.child("ue")) read_radio(*b, "config.radios.ue", cfg.radios.ue);
  }
}

}  // namespace

void SimConfig::validate() const {
  if (frames < 1) throw ConfigError("frames must be >= 1");
  if (drops < 1) throw ConfigError("drops must be >= 1");
  if (models.empty()) throw ConfigError("models must not be empty");
  if (std::set<ConstraintModel>(models.begin(), models.end()).size() != models.size()) {
    throw ConfigError("models must not repeat");
  }
  if (snapshot_stride < 1) throw ConfigError("snapshot_stride must be >= 1");
  if (average_window < 1) throw ConfigError("average_window must be >= 1");
  if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
  rethrow_as_config("drop", [&] { drop.validate(); return 0; });
  rethrow_as_config("channel", [&] { channel.validate(); return 0; });
  rethrow_as_config("radios", [&] { radios.validate(); return 0; });
  rethrow_as_config("utility", [&] { utility.validate(); return 0; });
  if (!utility.strictly_concave()) {
    throw ConfigError("utility: congestion control needs a strictly concave utility");
  }
  rethrow_as_config("v", [&] { v_rule.validate(); return 0; });
}

SimConfig paper_preset() { return SimConfig{}; }

SimConfig desk_preset() {
  SimConfig cfg;
  cfg.drop.ue_count = 5;
  cfg.drop.rn_count = 2;
  cfg.frames = 20000;
  cfg.drops = 10;
  return cfg;
}

SimConfig preset_by_name(std::string_view name) {
  if (name == "paper") return paper_preset();
  if (name == "desk") return desk_preset();
  throw ConfigError("unknown preset '" + std::string(name) + "'");
}

SimConfig parse_config(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config: expected a JSON object");
  SimConfig cfg;
  if (auto it = root.find("preset"); it != root.end()) {
    if (!it->is_string()) throw ConfigError("config.preset: wrong type");
    cfg = preset_by_name(it->get<std::string>());
  }
  apply_overrides(root, cfg);
  cfg.validate();
  return cfg;
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string config_to_json(const SimConfig& cfg) {
  json j;
  j["frames"] = cfg.frames;
  j["drops"] = cfg.drops;
  j["master_seed"] = cfg.master_seed;
  j["output_dir"] = cfg.output_dir;
  json models = json::array();
  for (auto m : cfg.models) models.push_back(to_string(m));
  j["models"] = models;
  j["utility"] = to_string(cfg.utility);
  j["v"] = cfg.v_rule.explicit_value ? json{{"value", cfg.v_rule.value}}
                                     : json{{"rmax_multiplier", cfg.v_rule.rmax_multiplier}};
  j["arrival_law"] = to_string(cfg.arrival_law);
  j["solve_path"] = to_string(cfg.solve_path);
  j["snapshot_stride"] = cfg.snapshot_stride;
  j["average_window"] = cfg.average_window;
  j["threads"] = cfg.threads;
  j["write_svg"] = cfg.write_svg;
  j["write_schedule_trace"] = cfg.write_schedule_trace;
  j["queue_snapshot_stride"] = cfg.queue_snapshot_stride;
  j["drop"] = {{"cell_radius_m", cfg.drop.cell_radius_m},
               {"rn_distance_m", cfg.drop.rn_distance_m},
               {"rn_count", cfg.drop.rn_count},
               {"ue_count", cfg.drop.ue_count},
               {"pathloss_threshold_db", cfg.drop.pathloss_threshold_db},
               {"rotate_relays", cfg.drop.rotate_relays},
               {"max_ue_retries", cfg.drop.max_ue_retries}};
  j["channel"] = {{"carrier_hz", cfg.channel.carrier_hz},
                  {"bandwidth_hz", cfg.channel.bandwidth_hz},
                  {"frame_s", cfg.channel.frame_s},
                  {"alpha1", cfg.channel.alpha1},
                  {"alpha2_db", cfg.channel.alpha2_db},
                  {"thermal_noise_dbm_hz", cfg.channel.thermal_noise_dbm_hz},
                  {"cluster_rate", cfg.channel.cluster_rate},
                  {"paths_per_cluster", cfg.channel.paths_per_cluster},
                  {"angular_spread_mean_deg", cfg.channel.angular_spread_mean_deg},
                  {"fading_scale", to_string(cfg.channel.fading_scale)}};
  j["radios"] = {{"bs", radio_json(cfg.radios.bs)},
                 {"rn", radio_json(cfg.radios.rn)},
                 {"ue", radio_json(cfg.radios.ue)}};
  return j.dump(2);
}

const char* to_string(ArrivalLaw law) {
  return law == ArrivalLaw::kPoisson ? "poisson" : "deterministic";
}

ArrivalLaw arrival_law_from_string(std::string_view s) {
  if (s == "deterministic") return ArrivalLaw::kDeterministic;
  if (s == "poisson") return ArrivalLaw::kPoisson;
  throw InputError("unknown arrival law '" + std::string(s) + "'");
}

const char* to_string(SolvePath p) {
  switch (p) {
    case SolvePath::kAuto: return "auto";
    case SolvePath::kEnumeration: return "enumeration";
    case SolvePath::kBinaryProgram: return "binary_program";
  }
  return "?";
}

SolvePath solve_path_from_string(std::string_view s) {
  if (s == "auto") return SolvePath::kAuto;
  if (s == "enumeration") return SolvePath::kEnumeration;
  if (s == "binary_program") return SolvePath::kBinaryProgram;
  throw InputError("unknown solve path '" + std::string(s) + "'");
}

}  // namespace mbp
