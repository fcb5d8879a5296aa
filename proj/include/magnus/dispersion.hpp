#pragma once

#include <string>
#include <vector>

#include "magnus/model.hpp"

namespace magnus {

enum class Polarization { ordinary, extraordinary };

std::string to_string(Polarization p);
Polarization polarization_from_string(const std::string& s);

// Speed of light in um/fs and m/ps.
inline constexpr double kC_um_per_fs = 0.299792458;
inline constexpr double kC_m_per_ps = 2.99792458e-4;

struct SellmeierMedium {
    std::string name;
    Polarization polarization = Polarization::extraordinary;
    std::vector<double> a;  // 6 coefficients
    std::vector<double> b;  // 4 temperature coefficients
    double temperature_c = 24.5;
    double lambda_min = 0.0, lambda_max = 0.0;  // um
    std::string source;

    void validate() const;
    double n2(double lambda_um) const;
    double dn2_dlambda(double lambda_um) const;
};

struct MediaSet {
    std::vector<SellmeierMedium> media;
    const SellmeierMedium& get(Polarization p) const;
};

// Directory from MAGNUS_DATA_DIR if set, else the build-time data directory.
std::string data_directory();
MediaSet load_media(const std::string& path);
MediaSet load_default_media();

double refractive_index(const SellmeierMedium& m, double lambda_um);
double refractive_index_derivative(const SellmeierMedium& m, double lambda_um);
// c / v_g = n - lambda dn/dlambda.
double group_index(const SellmeierMedium& m, double lambda_um);
// v_g / c.
double group_velocity(const SellmeierMedium& m, double lambda_um);

struct PhaseMatchTriple {
    double lambda_p = 0.0, lambda_a = 0.0, lambda_b = 0.0;  // um
    Polarization pol_p = Polarization::extraordinary;
    Polarization pol_a = Polarization::ordinary;
    Polarization pol_b = Polarization::extraordinary;

    void validate() const;
};

// Angular frequencies in rad/fs (1e15 rad/s); pump is omega_a + omega_b.
PhaseMatchTriple triple_from_angular(double omega_a, double omega_b,
                                     Polarization pol_p = Polarization::extraordinary,
                                     Polarization pol_a = Polarization::ordinary,
                                     Polarization pol_b = Polarization::extraordinary);
double angular_frequency(double lambda_um);  // rad/fs

// The reference PPLN triple: signal 1.2707, idler 0.7293, pump 2.0000 rad/fs.
PhaseMatchTriple reference_triple();

// 1 / |n_p/l_p - n_a/l_a - n_b/l_b| in um; +infinity when already phase matched.
double poling_period(const MediaSet& media, const PhaseMatchTriple& t);

// Physical setup in picosecond units: L in metres on input, velocities in m/ps,
// central frequencies in rad/ps.
PhysicalSetup build_setup(const MediaSet& media, const PhaseMatchTriple& t, double L_m,
                          double tau_ps, double eps, double gamma);

}  // namespace magnus
