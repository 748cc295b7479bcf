#include "rtp/sweep.hpp"
#include "rtp/errors.hpp"
#include "rtp/parallel.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace rtp {

namespace {

// Shortest text that reads back to the same double.
std::string fmt(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double to_num(const std::string& s, const std::string& ctx) {
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw config_error(ctx + ": not a number: '" + s + "'");
}

}  // namespace

SweepAxis parse_axis(const std::string& spec) {
    auto eq = spec.find('=');
    if (eq == std::string::npos) throw config_error("sweep axis '" + spec + "': expected key=values");
    SweepAxis ax;
    ax.key = spec.substr(0, eq);
    while (!ax.key.empty() && ax.key.back() == ' ') ax.key.pop_back();
    while (!ax.key.empty() && ax.key.front() == ' ') ax.key.erase(ax.key.begin());
    std::string vals = spec.substr(eq + 1);
    vals.erase(0, vals.find_first_not_of(' '));
    while (!vals.empty() && vals.back() == ' ') vals.pop_back();
    {
        ConfigTable probe;
        set_config_value(probe, ax.key, "0");
    }
    if (vals.find(':') != std::string::npos) {
        std::vector<std::string> f;
        std::istringstream in(vals);
        std::string x;
        while (std::getline(in, x, ':')) f.push_back(x);
        if (f.size() < 2 || f.size() > 3) throw config_error("sweep axis '" + spec + "': range is lo:hi[:step]");
        const double lo = to_num(f[0], spec), hi = to_num(f[1], spec);
        const double step = f.size() == 3 ? to_num(f[2], spec) : 1.0;
        if (!(step > 0.0) || hi < lo) throw config_error("sweep axis '" + spec + "': empty range");
        const long n = static_cast<long>(std::floor((hi - lo) / step + 1e-9)) + 1;
        for (long i = 0; i < n; ++i) {
            // Round to the step's decimal resolution so 0.1*3 prints as 0.3.
            double v = lo + static_cast<double>(i) * step;
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.12g", v);
            ax.values.emplace_back(buf);
        }
    } else {
        std::istringstream in(vals);
        std::string x;
        while (std::getline(in, x, ',')) {
            x.erase(0, x.find_first_not_of(' '));
            while (!x.empty() && x.back() == ' ') x.pop_back();
            if (!x.empty()) ax.values.push_back(x);
        }
    }
    if (ax.values.empty()) throw config_error("sweep axis '" + spec + "' has no values");
    return ax;
}

std::vector<SweepRow> run_sweep(const ConfigTable& base, const std::vector<SweepAxis>& axes,
                                const std::string& base_dir, const SweepOptions& opt) {
    if (axes.empty()) throw config_error("sweep: empty grid");
    std::size_t cells = 1;
    for (const auto& ax : axes) {
        if (ax.values.empty()) throw config_error("sweep: empty grid");
        cells *= ax.values.size();
    }
    std::vector<SweepRow> rows(cells);
    // Row-major: the last axis varies fastest.
    for (std::size_t c = 0; c < cells; ++c) {
        std::size_t rem = c;
        rows[c].values.resize(axes.size());
        for (std::size_t a = axes.size(); a-- > 0;) {
            rows[c].values[a] = axes[a].values[rem % axes[a].values.size()];
            rem /= axes[a].values.size();
        }
    }
    parallel_for(cells, opt.workers, [&](std::size_t c) {
        SweepRow& row = rows[c];
        try {
            ConfigTable t = base;
            for (std::size_t a = 0; a < axes.size(); ++a) set_config_value(t, axes[a].key, row.values[a]);
            if (opt.per_cell_seeds) {
                long base_seed = 1;
                if (t.count("simulation") && t["simulation"].count("seed"))
                    base_seed = std::stol(t["simulation"]["seed"]);
                t["simulation"]["seed"] = std::to_string(cell_seed(static_cast<std::uint64_t>(base_seed), c) >> 1);
            }
            const Scenario sc = build_scenario(t, base_dir);
            const SimResult r = run(sc.sim);
            row.sigma_e = r.sigma_e;
            row.converged = r.convergent;
            row.mean_h = r.mean_h;
            row.status = to_string(r.status);
        } catch (const std::exception& e) {
            row.status = "error";
            row.error = e.what();
        }
    });
    return rows;
}

void write_sweep_csv(const std::string& path, const std::vector<SweepAxis>& axes,
                     const std::vector<SweepRow>& rows) {
    std::ofstream out(path);
    if (!out) throw ingestion_error("cannot write " + path);
    for (const auto& ax : axes) out << ax.key << ",";
    out << "sigma_e,converged,mean_h,status,error\n";
    for (const auto& r : rows) {
        for (const auto& v : r.values) out << v << ",";
        std::string err = r.error;
        for (char& ch : err)
            if (ch == ',' || ch == '\n') ch = ';';
        out << fmt(r.sigma_e) << "," << (r.converged ? 1 : 0) << "," << fmt(r.mean_h) << "," << r.status << ","
            << err << "\n";
    }
}

std::vector<SweepRow> read_sweep_csv(const std::string& path, std::size_t n_axes) {
    std::ifstream in(path);
    if (!in) throw ingestion_error("cannot open " + path);
    std::string line;
    std::getline(in, line);
    std::vector<SweepRow> rows;
    long rowno = 1;
    while (std::getline(in, line)) {
        ++rowno;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::size_t pos = 0;
        for (;;) {
            auto comma = line.find(',', pos);
            f.push_back(line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (f.size() != n_axes + 5) throw ingestion_error(path + ": wrong column count", rowno);
        SweepRow r;
        r.values.assign(f.begin(), f.begin() + static_cast<long>(n_axes));
        r.sigma_e = to_num(f[n_axes], path);
        r.converged = f[n_axes + 1] == "1";
        r.mean_h = to_num(f[n_axes + 2], path);
        r.status = f[n_axes + 3];
        r.error = f[n_axes + 4];
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace rtp
