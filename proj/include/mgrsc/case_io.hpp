#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "mgrsc/network.hpp"

namespace mgrsc {

// Case files describe the grid in engineering units (MW, MVAr, ohm, amps,
// kV); everything is converted to per-unit on load. Top-level keys:
//   s_base_mva, v_base_kv, buses[], branches[], generators[], bess[],
//   random_devices[], dispatch_buses[] (optional; defaults to every
//   dispatchable generator bus).
Network case_from_json(const nlohmann::json& doc);
nlohmann::ordered_json case_to_json(const Network& net, const std::string& id = "");

Network load_case_file(const std::string& path);
void save_case_file(const Network& net, const std::string& path, const std::string& id = "");

// Accepts either the builtin case name ("ieee33-modified") or a path to a
// case JSON file.
Network resolve_case(const std::string& spec);

}  // namespace mgrsc
