#include "clrcast/copula_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <boost/math/distributions/students_t.hpp>

#include "clrcast/error.hpp"
#include "clrcast/parallel.hpp"

namespace clrcast {

const char* family_name(Family f) {
    switch (f) {
        case Family::gaussian: return "gaussian";
        case Family::student_t: return "student_t";
        case Family::gumbel: return "gumbel";
        case Family::clayton: return "clayton";
        case Family::frank: return "frank";
        case Family::frechet: return "frechet";
        case Family::independence: return "independence";
    }
    return "?";
}

Family parse_family(const std::string& s) {
    for (Family f : {Family::gaussian, Family::student_t, Family::gumbel, Family::clayton, Family::frank,
                     Family::frechet, Family::independence})
        if (s == family_name(f)) return f;
    if (s == "t") return Family::student_t;
    throw ConfigError("unknown copula family '" + s + "'");
}

namespace {

std::size_t expected_params(Family f) {
    switch (f) {
        case Family::independence: return 0;
        case Family::student_t:
        case Family::frechet: return 2;
        default: return 1;
    }
}

double open_unit(double x) {
    constexpr double lo = std::numeric_limits<double>::min();
    constexpr double hi = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
    return std::clamp(x, lo, hi);
}

double uniform01(std::mt19937_64& rng) {
    // (0,1): 53 random bits offset by half an ulp
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

double exponential(std::mt19937_64& rng) { return -std::log(uniform01(rng)); }

double normal(std::mt19937_64& rng) {
    // Box-Muller, one variate per call
    const double a = uniform01(rng);
    const double b = uniform01(rng);
    return std::sqrt(-2.0 * std::log(a)) * std::cos(2.0 * std::numbers::pi * b);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace

void validate(const CopulaSpec& s) {
    if (s.params.size() != expected_params(s.family))
        throw ConfigError(std::string("copula ") + family_name(s.family) + ": expected " +
                          std::to_string(expected_params(s.family)) + " parameters");
    for (double x : s.params)
        if (!std::isfinite(x)) throw ConfigError("copula parameters must be finite");
    switch (s.family) {
        case Family::gaussian:
            if (!(std::abs(s.params[0]) < 1.0)) throw ConfigError("gaussian copula: |rho| must be below 1");
            break;
        case Family::student_t:
            if (!(s.params[0] > 2.0)) throw ConfigError("student_t copula: nu must exceed 2");
            if (!(std::abs(s.params[1]) < 1.0)) throw ConfigError("student_t copula: |rho| must be below 1");
            break;
        case Family::gumbel:
            if (!(s.params[0] >= 1.0)) throw ConfigError("gumbel copula: theta must be at least 1");
            break;
        case Family::clayton:
            if (!(s.params[0] > 0.0)) throw ConfigError("clayton copula: theta must be positive");
            break;
        case Family::frank:
            if (s.params[0] == 0.0) throw ConfigError("frank copula: theta must be nonzero");
            break;
        case Family::frechet:
            if (!(s.params[0] >= 0.0 && s.params[1] >= 0.0 && s.params[0] + s.params[1] <= 1.0))
                throw ConfigError("frechet copula: need p, q >= 0 and p + q <= 1");
            break;
        case Family::independence: break;
    }
}

std::vector<Point2> sample(const CopulaSpec& spec, int n) {
    validate(spec);
    if (n < 1) throw ConfigError("sample: n must be positive");
    std::mt19937_64 rng(spec.seed);
    std::vector<Point2> out(static_cast<std::size_t>(n));
    const auto& par = spec.params;
    switch (spec.family) {
        case Family::independence:
            for (auto& q : out) {
                q.u = uniform01(rng);
                q.v = uniform01(rng);
            }
            break;
        case Family::gaussian: {
            const double rho = par[0];
            const double s = std::sqrt(1.0 - rho * rho);
            for (auto& q : out) {
                const double z1 = normal(rng);
                const double z2 = rho * z1 + s * normal(rng);
                q = {open_unit(normal_cdf(z1)), open_unit(normal_cdf(z2))};
            }
            break;
        }
        case Family::student_t: {
            const double nu = par[0];
            const double rho = par[1];
            const double s = std::sqrt(1.0 - rho * rho);
            std::gamma_distribution<double> chi2(nu / 2.0, 2.0);
            const boost::math::students_t dist(nu);
            for (auto& q : out) {
                const double z1 = normal(rng);
                const double z2 = rho * z1 + s * normal(rng);
                const double w = std::sqrt(nu / chi2(rng));
                q = {open_unit(boost::math::cdf(dist, z1 * w)), open_unit(boost::math::cdf(dist, z2 * w))};
            }
            break;
        }
        case Family::clayton: {
            const double theta = par[0];
            std::gamma_distribution<double> frailty(1.0 / theta, 1.0);
            for (auto& q : out) {
                const double V = frailty(rng);
                const double e1 = exponential(rng);
                const double e2 = exponential(rng);
                q = {open_unit(std::pow(1.0 + e1 / V, -1.0 / theta)), open_unit(std::pow(1.0 + e2 / V, -1.0 / theta))};
            }
            break;
        }
        case Family::gumbel: {
            const double theta = par[0];
            const double a = 1.0 / theta;
            for (auto& q : out) {
                double S = 1.0;
                if (theta > 1.0) {
                    // positive stable variate with Laplace transform exp(-s^a)
                    const double U = std::numbers::pi * uniform01(rng);
                    const double E = exponential(rng);
                    S = std::sin(a * U) / std::pow(std::sin(U), 1.0 / a) *
                        std::pow(std::sin((1.0 - a) * U) / E, (1.0 - a) / a);
                }
                const double e1 = exponential(rng);
                const double e2 = exponential(rng);
                q = {open_unit(std::exp(-std::pow(e1 / S, a))), open_unit(std::exp(-std::pow(e2 / S, a)))};
            }
            break;
        }
        case Family::frank: {
            const double theta = par[0];
            const double em1 = std::expm1(-theta);
            for (auto& q : out) {
                const double u = uniform01(rng);
                const double w = uniform01(rng);
                const double v = -std::log1p(w * em1 / (w + (1.0 - w) * std::exp(-theta * u))) / theta;
                q = {u, open_unit(v)};
            }
            break;
        }
        case Family::frechet: {
            const double p = par[0];
            const double qw = par[1];
            for (auto& q : out) {
                const double pick = uniform01(rng);
                const double u = uniform01(rng);
                if (pick < qw) {
                    q = {u, u};
                } else if (pick < qw + p) {
                    q = {u, open_unit(1.0 - u)};
                } else {
                    q = {u, uniform01(rng)};
                }
            }
            break;
        }
    }
    return out;
}

TdcPair true_tdc(const CopulaSpec& spec) {
    validate(spec);
    TdcPair t;
    t.threshold = 0.0;
    const auto& par = spec.params;
    switch (spec.family) {
        case Family::gumbel: t.lambda_U = 2.0 - std::pow(2.0, 1.0 / par[0]); break;
        case Family::clayton: t.lambda_L = std::pow(2.0, -1.0 / par[0]); break;
        case Family::frechet: t.lambda_U = t.lambda_L = par[1]; break;
        case Family::student_t: {
            const double nu = par[0];
            const double rho = par[1];
            const boost::math::students_t dist(nu + 1.0);
            const double x = -std::sqrt((nu + 1.0) * (1.0 - rho) / (1.0 + rho));
            t.lambda_U = t.lambda_L = 2.0 * boost::math::cdf(dist, x);
            break;
        }
        case Family::gaussian:
        case Family::frank:
        case Family::independence: break;
    }
    return t;
}

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t period_seed(std::uint64_t seed, std::uint64_t t) { return splitmix64(splitmix64(seed) + t); }

std::vector<std::vector<Point2>> generate_scenario(const DynamicScenario& sc) {
    if (sc.segments.empty()) throw ConfigError("generate_scenario: empty scenario");
    struct Job {
        CopulaSpec spec;
        int n;
    };
    std::vector<Job> jobs;
    for (const auto& seg : sc.segments) {
        if (seg.n < 2) throw ConfigError("generate_scenario: period length must be at least 2");
        if (seg.periods < 1) throw ConfigError("generate_scenario: segment needs at least one period");
        validate(seg.spec);
        for (int k = 0; k < seg.periods; ++k) {
            CopulaSpec s = seg.spec;
            s.seed = period_seed(sc.seed, jobs.size());
            jobs.push_back({s, seg.n});
        }
    }
    std::vector<std::vector<Point2>> out(jobs.size());
    parallel_for(jobs.size(), [&](std::size_t t) { out[t] = sample(jobs[t].spec, jobs[t].n); });
    return out;
}

}  // namespace clrcast
