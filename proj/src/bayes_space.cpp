#include "clrcast/bayes_space.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "clrcast/error.hpp"

namespace clrcast {

namespace {

void require_density(const DensityField& f, const char* op) {
    if (f.space != Space::density) throw ConfigError(std::string(op) + ": expected a density-space field");
    if (static_cast<std::size_t>(f.values.size()) != f.design.size())
        throw ConfigError(std::string(op) + ": value count does not match design");
    for (Eigen::Index i = 0; i < f.values.size(); ++i)
        if (!std::isfinite(f.values(i)) || f.values(i) < 0.0)
            throw DataError(std::string(op) + ": invalid density value at index " + std::to_string(i));
}

void require_common_design(const DensityField& f, const DensityField& g, const char* op) {
    if (!(f.design == g.design)) throw ConfigError(std::string(op) + ": fields must share a design");
}

DensityField normalized(DensityField f, const char* op) {
    const double total = integrate(f);
    if (!(total > 0.0) || !std::isfinite(total)) throw NumericalError(std::string(op) + ": zero normalizer");
    f.values /= total;
    f.space = Space::density;
    return f;
}

}  // namespace

DensityField clr(const DensityField& f, double tol) {
    require_density(f, "clr");
    const double fmax = f.values.maxCoeff();
    if (!(fmax > 0.0)) throw DataError("clr: all-zero field");
    const double floor = kDensityFloor * fmax;
    DensityField g = f;
    g.space = Space::clr;
    g.meta.clip_count = 0;
    for (Eigen::Index i = 0; i < g.values.size(); ++i) {
        double x = f.values(i);
        if (x < floor) {
            x = floor;
            ++g.meta.clip_count;
        }
        g.values(i) = std::log(x);
    }
    const Vec w = f.design.weights();
    g.values.array() -= w.dot(g.values) / f.design.measure();
    const double check = w.dot(g.values);
    if (!(std::abs(check) <= tol))
        throw NumericalError("clr: zero-integral check failed, quadrature = " + std::to_string(check));
    return g;
}

DensityField clr_inverse(const DensityField& g) {
    if (g.space != Space::clr) throw ConfigError("clr_inverse: expected a clr-space field");
    if (!g.values.allFinite()) throw DataError("clr_inverse: non-finite value");
    DensityField f = g;
    f.values = (g.values.array() - g.values.maxCoeff()).exp();
    f.space = Space::density;
    return normalized(std::move(f), "clr_inverse");
}

DensityField perturb(const DensityField& f, const DensityField& g) {
    require_density(f, "perturb");
    require_density(g, "perturb");
    require_common_design(f, g, "perturb");
    DensityField out = f;
    out.values = f.values.cwiseProduct(g.values);
    return normalized(std::move(out), "perturb");
}

DensityField power(double alpha, const DensityField& f) {
    require_density(f, "power");
    if (!std::isfinite(alpha)) throw ConfigError("power: non-finite exponent");
    DensityField out = f;
    if (alpha == 0.0) {
        out.values.setOnes();
    } else {
        // work in logs; zero values with negative alpha are not representable
        for (Eigen::Index i = 0; i < f.values.size(); ++i) {
            if (f.values(i) == 0.0 && alpha < 0.0) throw NumericalError("power: zero density raised to a negative power");
            out.values(i) = std::pow(f.values(i), alpha);
        }
    }
    return normalized(std::move(out), "power");
}

DensityField normalize(const DensityField& f) {
    require_density(f, "normalize");
    return normalized(f, "normalize");
}

DensityField bayes_mean(std::span<const DensityField> fs) {
    if (fs.empty()) throw DataError("bayes_mean: no fields");
    DensityField acc = clr(fs[0]);
    for (std::size_t t = 1; t < fs.size(); ++t) {
        require_common_design(fs[0], fs[t], "bayes_mean");
        acc.values += clr(fs[t]).values;
    }
    acc.values /= static_cast<double>(fs.size());
    acc.meta = {};
    return clr_inverse(acc);
}

ReferenceMeasure ReferenceMeasure::lebesgue() {
    ReferenceMeasure r;
    r.kind = Kind::lebesgue;
    r.weight = [](const Point2&) { return 1.0; };
    r.sampler = [](std::mt19937_64& rng) {
        std::uniform_real_distribution<double> U(0.0, 1.0);
        const double a = U(rng);
        return Point2{a, U(rng)};
    };
    r.mass = 1.0;
    return r;
}

ReferenceMeasure ReferenceMeasure::gaussian(double mean_u, double mean_v, double sd_u, double sd_v) {
    if (!(sd_u > 0.0) || !(sd_v > 0.0)) throw ConfigError("ReferenceMeasure: standard deviations must be positive");
    ReferenceMeasure r;
    r.kind = Kind::weighted;
    r.weight = [=](const Point2& p) {
        const double zu = (p.u - mean_u) / sd_u;
        const double zv = (p.v - mean_v) / sd_v;
        return std::exp(-0.5 * (zu * zu + zv * zv)) / (2.0 * std::numbers::pi * sd_u * sd_v);
    };
    r.sampler = [=](std::mt19937_64& rng) {
        std::normal_distribution<double> N(0.0, 1.0);
        const double a = mean_u + sd_u * N(rng);
        return Point2{a, mean_v + sd_v * N(rng)};
    };
    r.mass = 1.0;
    return r;
}

double interpolate(const DensityField& f, const Point2& p) {
    if (!f.design.is_grid()) throw ConfigError("interpolate: grid design required");
    const int G = f.design.grid_size();
    const auto pos = [G](double x, double lo, double hi, int& k, double& t) {
        double s = (x - lo) / (hi - lo) * G - 0.5;
        s = std::clamp(s, 0.0, static_cast<double>(G - 1));
        k = std::min(static_cast<int>(s), std::max(G - 2, 0));
        t = s - k;
    };
    int r = 0, c = 0;
    double tu = 0.0, tv = 0.0;
    pos(p.u, f.design.u_lo(), f.design.u_hi(), r, tu);
    pos(p.v, f.design.v_lo(), f.design.v_hi(), c, tv);
    if (G == 1) return f.values(0);
    const auto at = [&](int i, int j) { return f.values(static_cast<Eigen::Index>(i) * G + j); };
    return (1 - tu) * (1 - tv) * at(r, c) + tu * (1 - tv) * at(r + 1, c) + (1 - tu) * tv * at(r, c + 1) +
           tu * tv * at(r + 1, c + 1);
}

DensityField weighted_clr(const DensityField& f, const ReferenceMeasure& ref, int mc_draws, std::uint64_t seed) {
    require_density(f, "weighted_clr");
    if (!(ref.mass > 0.0) || !std::isfinite(ref.mass)) throw ConfigError("weighted_clr: reference mass must be finite and positive");
    if (ref.kind == ReferenceMeasure::Kind::lebesgue) {
        DensityField g = clr(f);
        g.meta.seed = seed;
        g.meta.mc_stderr = 0.0;
        return g;
    }
    if (mc_draws < 2) throw ConfigError("weighted_clr: need at least two Monte Carlo draws");
    if (!ref.weight || !ref.sampler) throw ConfigError("weighted_clr: weighted reference needs a weight and a sampler");
    if (!f.design.is_grid()) throw ConfigError("weighted_clr: Monte Carlo expectation requires a grid design");

    DensityField g = f;
    g.space = Space::clr;
    for (Eigen::Index i = 0; i < f.values.size(); ++i) {
        const auto& p = f.design[static_cast<std::size_t>(i)];
        const double w = ref.weight(p);
        const double h = std::log(f.values(i) / w);
        if (!std::isfinite(h)) {
            std::ostringstream os;
            os << "weighted_clr: non-finite log ratio at (" << p.u << ", " << p.v << ")";
            throw DataError(os.str());
        }
        g.values(i) = h;
    }

    const auto log_ratio = [&](const Point2& p) {
        return std::log(interpolate(f, p) / ref.weight(p));
    };

    std::mt19937_64 rng(seed);
    double mean = 0.0;
    double m2 = 0.0;
    long accepted = 0;
    long attempts = 0;
    const long max_attempts = 1000L * mc_draws;
    while (accepted < mc_draws) {
        if (++attempts > max_attempts) throw NumericalError("weighted_clr: reference measure rarely hits the design domain");
        const Point2 p = ref.sampler(rng);
        if (!(p.u >= f.design.u_lo() && p.u <= f.design.u_hi() && p.v >= f.design.v_lo() && p.v <= f.design.v_hi()))
            continue;
        const double h = log_ratio(p);
        if (!std::isfinite(h)) {
            std::ostringstream os;
            os << "weighted_clr: non-finite log ratio at draw (" << p.u << ", " << p.v << ")";
            throw DataError(os.str());
        }
        ++accepted;
        const double d = h - mean;
        mean += d / static_cast<double>(accepted);
        m2 += d * (h - mean);
    }
    g.values.array() -= mean;
    g.meta.seed = seed;
    g.meta.mc_stderr = std::sqrt(m2 / static_cast<double>(accepted - 1) / static_cast<double>(accepted));
    return g;
}

}  // namespace clrcast
