#include "rtp/errors.hpp"
#include "rtp/scenario.hpp"

#include <map>

namespace rtp {

namespace {

// Region-scale running example: p=152, q=4503, b=2000, clearing price 20.
const char* kRegion = R"([supplier]
p = 152
q = 4503

[demand]
model = aggregate
epsilon = -0.8
lambda_star = 20

[baseline]
constant = 2000

[simulation]
T = 0.5
horizon = 1056
seed = 1
lambda0 = 21
feeder_rating = none
mean_h_window = 100
)";

// Feeder-scale setup: 1405 houses with sampled CEO parameters (kW), a
// synthetic daily baseline, and the feeder supply curve in MW.
const char* kFeeder = R"([supplier]
p = 0.043638
q = 1.287

[demand]
model = population
count = 1405
units = kW

[baseline]
synthetic_lo = 0.276
synthetic_hi = 0.488
houses = 1405
units = kW

[controller]
mode = adaptive
eta = 0.5
lambda_min = 1
lambda_max = 200

[simulation]
T = 0.5
horizon = 1056
seed = 7
lambda0 = 20
feeder_rating = auto
)";

std::map<std::string, std::string> build() {
    std::map<std::string, std::string> m;
    auto region = [](const std::string& name, const std::string& controller, const std::string& attack) {
        return "[scenario]\nname = " + name + "\n\n" + kRegion + "\n[controller]\n" + controller +
               "lambda_min = 1\nlambda_max = 200\n\n[attack]\n" + attack;
    };
    auto feeder = [](const std::string& name, const std::string& attack, const std::string& extra = "") {
        return "[scenario]\nname = " + name + "\nunits = MW\n\n" + kFeeder + "\n[attack]\n" + attack + "\n" + extra +
               "[output]\ndir = out/" + name + "\n";
    };

    m["fig2"] = R"([scenario]
name = fig2

[supplier]
p = 152
q = 4503

[demand]
model = aggregate
epsilon = -0.6
lambda_star = 20

[baseline]
constant = 2000

[controller]
mode = direct-feedback
lambda_min = 1
lambda_max = 100

[attack]
kind = none

[simulation]
T = 0.5
horizon = 1056
seed = 1
lambda0 = 21
feeder_rating = none
)";
    m["fig3a"] = region("fig3a", "mode = adaptive\neta = 0.5\n", "kind = none\n");
    m["fig3a-eta0.8"] = region("fig3a-eta0.8", "mode = adaptive\neta = 0.8\n", "kind = none\n");
    m["fig3a-eta0.2"] = region("fig3a-eta0.2", "mode = adaptive\neta = 0.2\n", "kind = none\n");
    m["fig3b-gamma0.57"] = region("fig3b-gamma0.57", "mode = adaptive\neta = 0.8\n",
                                  "kind = scaling\nrho = 1\ngamma = 0.57\nstart = 0\n");
    m["fig3b-gamma0.59"] = region("fig3b-gamma0.59", "mode = adaptive\neta = 0.8\n",
                                  "kind = scaling\nrho = 1\ngamma = 0.59\nstart = 0\n");
    m["fig3c-tau12"] = region("fig3c-tau12", "mode = adaptive\neta = 0.2\n",
                              "kind = delay\nrho = 1\ntau = 12\nstart = auto\n");
    m["fig3c-tau11"] = region("fig3c-tau11", "mode = adaptive\neta = 0.2\n",
                              "kind = delay\nrho = 1\ntau = 11\nstart = auto\n");
    m["feeder-benign"] = feeder("feeder-benign", "kind = none\n");
    m["fig5"] = feeder("fig5", "kind = scaling\nrho = 0.65\ngamma = 0.1\nstart = auto\n");
    m["fig6"] = feeder("fig6", "kind = delay\nrho = 1\ntau = 9\nstart = auto\n");
    m["fig6-rho0.65-tau24"] = feeder("fig6-rho0.65-tau24", "kind = delay\nrho = 0.65\ntau = 24\nstart = auto\n");
    m["fig10a"] = feeder("fig10a", "kind = scaling\nrho = 1\ngamma = 0.5\nstart = auto\n",
                         "[sweep]\naxes = attack.rho=0.25,0.5,0.65,1.0 | attack.gamma=0.1:1.0:0.1\n\n");
    m["fig10b"] = feeder("fig10b", "kind = delay\nrho = 1\ntau = 1\nstart = auto\n",
                         "[sweep]\naxes = attack.rho=0.25,0.5,0.65,1.0 | attack.tau=1:24\n\n");
    return m;
}

const std::map<std::string, std::string>& presets() {
    static const auto m = build();
    return m;
}

}  // namespace

std::vector<std::string> preset_names() {
    std::vector<std::string> out;
    for (const auto& [k, v] : presets()) out.push_back(k);
    return out;
}

bool is_preset(const std::string& name) { return presets().count(name) > 0; }

const std::string& preset_text(const std::string& name) {
    auto it = presets().find(name);
    if (it == presets().end()) throw config_error("unknown preset '" + name + "'");
    return it->second;
}

}  // namespace rtp
