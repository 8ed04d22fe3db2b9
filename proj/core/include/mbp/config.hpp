#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "mbp/channel.hpp"
#include "mbp/congestion.hpp"
#include "mbp/queue.hpp"
#include "mbp/scheduler.hpp"
#include "mbp/topology.hpp"

namespace mbp {

struct SimConfig {
  DropConfig drop;
  ChannelParams channel;
  RadioSet radios;
  std::size_t frames = 100000;
  std::vector<ConstraintModel> models{kAllModels.begin(), kAllModels.end()};
  UtilityFunction utility = UtilityFunction::proportional_fair();
  VRule v_rule;
  std::size_t drops = 50;
  std::uint64_t master_seed = 1;
  std::string output_dir = "mbp-out";

  ArrivalLaw arrival_law = ArrivalLaw::kDeterministic;
  SolvePath solve_path = SolvePath::kAuto;
  std::size_t snapshot_stride = 100;
  std::size_t average_window = 1000;
  // 0 = one worker per hardware thread.
  unsigned threads = 0;
  bool write_svg = false;
  bool write_schedule_trace = false;
  // 0 = no queue snapshots.
  std::size_t queue_snapshot_stride = 0;

  void validate() const;
};

// Picocell setup used for the published figures: 10 UEs, 4 relays,
// 10^5 frames, 50 drops.
SimConfig paper_preset();
// Reduced scale for quick checks: 5 UEs, 2 relays, 2*10^4 frames, 10 drops.
SimConfig desk_preset();
SimConfig preset_by_name(std::string_view name);

// JSON object. An optional "preset" key picks the starting point; every
// other key overrides it. Unknown keys and wrong types are ConfigErrors.
SimConfig parse_config(std::string_view json_text);
SimConfig load_config(const std::string& path);
std::string config_to_json(const SimConfig& cfg);

const char* to_string(ArrivalLaw law);
ArrivalLaw arrival_law_from_string(std::string_view s);
const char* to_string(SolvePath p);
SolvePath solve_path_from_string(std::string_view s);

}  // namespace mbp
