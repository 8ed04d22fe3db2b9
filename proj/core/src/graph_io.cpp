#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "mbp/error.hpp"
#include "mbp/topology.hpp"

namespace mbp {

namespace {

LinkState parse_state(const std::string& s) {
  if (s == "LOS") return LinkState::kLineOfSight;
  if (s == "NLOS") return LinkState::kNonLineOfSight;
  if (s == "OUT") return LinkState::kOutage;
  throw InputError("unknown link state '" + s + "'");
}

}  // namespace

// Format, one record per line:
//   # mbp-graph format-version 1
//   node <id> <BS|RN|UE> <x_m> <y_m>
//   link <tx> <rx> <pathloss_db> <beam_gain> <rate_bits> <full_power_rate_bits> <state>
// Lines starting with '#' after the header are comments.
void write_graph(std::ostream& os, const NetworkGraph& g) {
  os << "# mbp-graph format-version " << kGraphFormatVersion << '\n';
  os << "# node <id> <class> <x_m> <y_m>\n";
  os << "# link <tx> <rx> <pathloss_db> <beam_gain> <rate_bits> <full_power_rate_bits> <state>\n";
  os << std::setprecision(17);
  for (const Node& n : g.nodes) {
    os << "node " << n.id << ' ' << to_string(n.node_class) << ' ' << n.x_m << ' ' << n.y_m
       << '\n';
  }
  for (const Link& l : g.links) {
    os << "link " << l.tx << ' ' << l.rx << ' ' << l.channel.pathloss_db << ' '
       << l.channel.beam_gain() << ' ' << l.rate_bits << ' ' << l.full_power_rate_bits << ' '
       << to_string(l.channel.state) << '\n';
  }
}

NetworkGraph read_graph(std::istream& is, const RadioSet& radios) {
  NetworkGraph g;
  std::string line;
  int line_no = 0;
  bool header = false;
  while (std::getline(is, line)) {
    ++line_no;
    if (!header) {
      std::istringstream hs(line);
      std::string hash, magic, key;
      int version = 0;
      if (!(hs >> hash >> magic >> key >> version) || hash != "#" || magic != "mbp-graph" ||
          key != "format-version") {
        throw InputError("graph file: missing '# mbp-graph format-version' header");
      }
      if (version != kGraphFormatVersion) {
        throw InputError("graph file: unsupported format version " + std::to_string(version));
      }
      header = true;
      continue;
    }
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string kind;
    ls >> kind;
    auto fail = [&](const std::string& what) {
      throw InputError("graph file line " + std::to_string(line_no) + ": " + what);
    };
    if (kind == "node") {
      Node n;
      std::string cls;
      if (!(ls >> n.id >> cls >> n.x_m >> n.y_m)) fail("malformed node record");
      n.node_class = node_class_from_string(cls.c_str());
      n.radio = radios.for_class(n.node_class);
      if (n.id != static_cast<NodeId>(g.nodes.size())) fail("node ids must be dense and ordered");
      g.nodes.push_back(n);
    } else if (kind == "link") {
      Link l;
      std::string pl, state;
      double beam_gain = 0.0;
      if (!(ls >> l.tx >> l.rx >> pl >> beam_gain >> l.rate_bits >> l.full_power_rate_bits >> state)) {
        fail("malformed link record");
      }
      l.channel.state = parse_state(state);
      l.channel.pathloss_db =
          (pl == "inf") ? std::numeric_limits<double>::infinity() : std::stod(pl);
      const double amp = l.channel.pathloss_amplitude();
      l.channel.array_gain = amp > 0.0 ? beam_gain / amp : 0.0;
      g.links.push_back(std::move(l));
    } else {
      fail("unknown record '" + kind + "'");
    }
  }
  if (!header) throw InputError("graph file: empty input");
  g.rebuild_index();
  return g;
}

}  // namespace mbp
