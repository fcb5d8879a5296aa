#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "magnus/dispersion.hpp"
#include "magnus/jsa.hpp"
#include "magnus/model.hpp"

namespace magnus {

// Crystal description; converted with build_setup (L in m, tau in ps, omegas in rad/fs).
struct PhysicalBlock {
    double length_m = 0.0;
    double tau_ps = 0.0;
    double epsilon = 0.0;
    double gamma = 0.193;
    double omega_a = 0.0;
    double omega_b = 0.0;
    Polarization pol_p = Polarization::extraordinary;
    Polarization pol_a = Polarization::ordinary;
    Polarization pol_b = Polarization::extraordinary;
    std::string media_file;  // empty: the bundled data file
};

struct GridSpec {
    int points = 129;
    double span = 4.0;  // half-width in units of the J1 Gaussian width
};

struct FcBlock {
    std::string target = "coupling";  // modes | coupling | solve_eps
    int n = 0;
    int modes = 8;
    int points = 1001;
};

struct OracleBlock {
    std::string which = "quadrature";  // quadrature | propagator
    std::vector<Detuning> points;
    std::vector<double> eps_list{0.02, 0.01, 0.005};
    int bins = 6;
    double bin_width = 0.7;
    int max_pairs = 2;
};

struct Overrides {
    std::optional<int> grid_points;
    std::optional<double> span;
    std::optional<std::string> out;
    std::optional<std::string> format;
};

struct RunConfig {
    std::optional<GaussianConfig> gaussian;
    std::optional<PhysicalBlock> physical;
    GridSpec grid;
    QuadratureSpec quad;
    FcBlock fc;
    OracleBlock oracle;
    std::string output_path;  // empty: standard output
    std::string format = "csv";
    // Sorted-key dump of the effective config without its output block.
    std::string canonical;

    void validate() const;
};

RunConfig parse_run_config(const std::string& json_text, const Overrides& ov = {});
RunConfig load_run_config(const std::string& path, const Overrides& ov = {});

// FNV-1a 64 of the canonical text, as 16 hex digits.
std::string config_hash(const RunConfig& run);

MediaSet media_for(const PhysicalBlock& b);
PhysicalSetup physical_setup(const PhysicalBlock& b);
GaussianConfig resolve_gaussian(const RunConfig& run);

}  // namespace magnus
