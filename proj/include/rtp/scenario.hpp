#pragma once

#include "rtp/sim.hpp"

#include <map>
#include <string>
#include <vector>

namespace rtp {

// section -> key -> raw value text.
using ConfigTable = std::map<std::string, std::map<std::string, std::string>>;

ConfigTable parse_ini(const std::string& text);
ConfigTable parse_json_config(const std::string& text);
std::string to_ini(const ConfigTable& t);

// Reads INI or JSON (by a leading '{').  Unknown sections or keys are
// rejected with config_error.
ConfigTable read_config_file(const std::string& path);

// "section.key" = value; validates the key.
void set_config_value(ConfigTable& t, const std::string& dotted, const std::string& value);

struct Scenario {
    std::string name;
    std::string units = "MW";
    SimConfig sim;
    bool rating_auto = false;
    std::string out_dir;
    std::vector<std::string> sweep_axes;
};

// Relative paths in the table resolve against base_dir.
Scenario build_scenario(const ConfigTable& t, const std::string& base_dir = ".");
Scenario load_scenario(const std::string& path_or_preset);

std::vector<std::string> preset_names();
bool is_preset(const std::string& name);
const std::string& preset_text(const std::string& name);

}  // namespace rtp
