#pragma once

#include "rtp/scenario.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace rtp {

struct SweepAxis {
    std::string key;  // "section.key"
    std::vector<std::string> values;
};

// "attack.rho=0.25,0.5" or "attack.tau=1:24" or "attack.gamma=0.1:1.0:0.1".
SweepAxis parse_axis(const std::string& spec);

struct SweepRow {
    std::vector<std::string> values;  // one per axis
    double sigma_e = 0.0;
    bool converged = false;
    double mean_h = 0.0;
    std::string status;
    std::string error;  // empty unless the cell failed
};

struct SweepOptions {
    int workers = 1;
    // false: every cell reuses the scenario seed (common random numbers);
    // true: cell i gets cell_seed(seed, i).
    bool per_cell_seeds = false;
};

std::vector<SweepRow> run_sweep(const ConfigTable& base, const std::vector<SweepAxis>& axes,
                                const std::string& base_dir, const SweepOptions& opt = {});

void write_sweep_csv(const std::string& path, const std::vector<SweepAxis>& axes,
                     const std::vector<SweepRow>& rows);
std::vector<SweepRow> read_sweep_csv(const std::string& path, std::size_t n_axes);

}  // namespace rtp
