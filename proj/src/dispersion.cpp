#include "magnus/dispersion.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <numbers>

#include "magnus/errors.hpp"

namespace magnus {

namespace {

constexpr double kEnergyTol = 1e-6;

double temperature_term(double T) { return (T - 24.5) * (T + 570.82); }

}  // namespace

std::string to_string(Polarization p) {
    return p == Polarization::ordinary ? "ordinary" : "extraordinary";
}

Polarization polarization_from_string(const std::string& s) {
    if (s == "ordinary" || s == "o") return Polarization::ordinary;
    if (s == "extraordinary" || s == "e") return Polarization::extraordinary;
    throw ConfigError("unknown polarization '" + s + "'");
}

void SellmeierMedium::validate() const {
    if (a.size() != 6 || b.size() != 4)
        throw ConfigError("Sellmeier medium '" + name + "' needs 6 a and 4 b coefficients");
    if (!(lambda_min > 0 && lambda_min < lambda_max))
        throw ConfigError("Sellmeier medium '" + name + "' has an invalid wavelength window");
    // n^2 > 1 across the window, checked on a fine sample.
    for (int i = 0; i <= 200; ++i) {
        const double l = lambda_min + (lambda_max - lambda_min) * i / 200.0;
        if (!(n2(l) > 1.0))
            throw ConfigError("Sellmeier medium '" + name + "' gives n^2 <= 1 inside its window");
    }
}

double SellmeierMedium::n2(double l) const {
    const double f = temperature_term(temperature_c);
    const double l2 = l * l;
    const double a3 = a[2] + b[2] * f;
    return a[0] + b[0] * f + (a[1] + b[1] * f) / (l2 - a3 * a3) + (a[3] + b[3] * f) / (l2 - a[4] * a[4]) -
           a[5] * l2;
}

double SellmeierMedium::dn2_dlambda(double l) const {
    const double f = temperature_term(temperature_c);
    const double l2 = l * l;
    const double a3 = a[2] + b[2] * f;
    const double d1 = l2 - a3 * a3;
    const double d2 = l2 - a[4] * a[4];
    return -2.0 * l * (a[1] + b[1] * f) / (d1 * d1) - 2.0 * l * (a[3] + b[3] * f) / (d2 * d2) -
           2.0 * a[5] * l;
}

const SellmeierMedium& MediaSet::get(Polarization p) const {
    for (const auto& m : media)
        if (m.polarization == p) return m;
    throw ConfigError("no medium for polarization " + to_string(p));
}

std::string data_directory() {
    if (const char* env = std::getenv("MAGNUS_DATA_DIR")) return env;
    return MAGNUS_DATA_DIR;
}

MediaSet load_media(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open media file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("media file " + path + " is not valid JSON: " + e.what());
    }
    MediaSet set;
    try {
        for (const auto& e : j.at("media")) {
            SellmeierMedium m;
            m.name = e.at("name").get<std::string>();
            m.polarization = polarization_from_string(e.at("polarization").get<std::string>());
            m.a = e.at("a").get<std::vector<double>>();
            m.b = e.at("b").get<std::vector<double>>();
            m.temperature_c = e.at("temperature_c").get<double>();
            const auto w = e.at("valid_range_um").get<std::vector<double>>();
            if (w.size() != 2) throw ConfigError("valid_range_um needs two entries");
            m.lambda_min = w[0];
            m.lambda_max = w[1];
            m.source = e.value("source", "");
            m.validate();
            set.media.push_back(std::move(m));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("media file " + path + ": " + e.what());
    }
    if (set.media.empty()) throw ConfigError("media file " + path + " lists no media");
    return set;
}

MediaSet load_default_media() { return load_media(data_directory() + "/mgo_ppln.json"); }

namespace {
void check_window(const SellmeierMedium& m, double l) {
    if (!(l >= m.lambda_min && l <= m.lambda_max))
        throw OutOfRange("wavelength outside the Sellmeier window of " + m.name + " (" +
                             to_string(m.polarization) + ")",
                         l);
}
}  // namespace

double refractive_index(const SellmeierMedium& m, double l) {
    check_window(m, l);
    return std::sqrt(m.n2(l));
}

double refractive_index_derivative(const SellmeierMedium& m, double l) {
    check_window(m, l);
    return m.dn2_dlambda(l) / (2.0 * std::sqrt(m.n2(l)));
}

double group_index(const SellmeierMedium& m, double l) {
    if (!(l > m.lambda_min && l < m.lambda_max))
        throw OutOfRange("group index needs a wavelength strictly inside the window", l);
    return refractive_index(m, l) - l * refractive_index_derivative(m, l);
}

double group_velocity(const SellmeierMedium& m, double l) { return 1.0 / group_index(m, l); }

void PhaseMatchTriple::validate() const {
    if (!(lambda_p > 0 && lambda_a > 0 && lambda_b > 0))
        throw ConfigError("wavelengths must be positive");
    const double lhs = 1.0 / lambda_p;
    const double rhs = 1.0 / lambda_a + 1.0 / lambda_b;
    if (std::abs(lhs - rhs) > kEnergyTol * lhs)
        throw ConfigError("triple violates energy conservation 1/l_p = 1/l_a + 1/l_b");
}

double angular_frequency(double lambda_um) {
    return 2.0 * std::numbers::pi * kC_um_per_fs / lambda_um;
}

PhaseMatchTriple triple_from_angular(double omega_a, double omega_b, Polarization pol_p,
                                     Polarization pol_a, Polarization pol_b) {
    const double k = 2.0 * std::numbers::pi * kC_um_per_fs;
    PhaseMatchTriple t;
    t.lambda_a = k / omega_a;
    t.lambda_b = k / omega_b;
    t.lambda_p = k / (omega_a + omega_b);
    t.pol_p = pol_p;
    t.pol_a = pol_a;
    t.pol_b = pol_b;
    t.validate();
    return t;
}

PhaseMatchTriple reference_triple() { return triple_from_angular(1.2707, 0.7293); }

double poling_period(const MediaSet& media, const PhaseMatchTriple& t) {
    t.validate();
    const double kp = refractive_index(media.get(t.pol_p), t.lambda_p) / t.lambda_p;
    const double dk = kp - refractive_index(media.get(t.pol_a), t.lambda_a) / t.lambda_a -
                      refractive_index(media.get(t.pol_b), t.lambda_b) / t.lambda_b;
    // Below round-off of the pump wavenumber the triple is already phase matched.
    if (std::abs(dk) <= 1e-12 * kp) return std::numeric_limits<double>::infinity();
    return 1.0 / std::abs(dk);
}

PhysicalSetup build_setup(const MediaSet& media, const PhaseMatchTriple& t, double L_m,
                          double tau_ps, double eps, double gamma) {
    t.validate();
    PhysicalSetup s;
    s.L = L_m;
    s.gamma = gamma;
    s.tau = tau_ps;
    s.epsilon = eps;
    s.v_p = kC_m_per_ps * group_velocity(media.get(t.pol_p), t.lambda_p);
    s.v_a = kC_m_per_ps * group_velocity(media.get(t.pol_a), t.lambda_a);
    s.v_b = kC_m_per_ps * group_velocity(media.get(t.pol_b), t.lambda_b);
    // rad/fs -> rad/ps
    s.omega_bar_a = 1e3 * angular_frequency(t.lambda_a);
    s.omega_bar_b = 1e3 * angular_frequency(t.lambda_b);
    s.omega_bar_p = s.omega_bar_a + s.omega_bar_b;
    s.process = Process::SPDC;
    s.validate();
    return s;
}

}  // namespace magnus
