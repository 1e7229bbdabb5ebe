#include "reflect/rates.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <random>
#include <sstream>

namespace reflect {

namespace {

struct MeanSd {
    Scalar mean = 0.0;
    Scalar sd = 0.0;
};

MeanSd mean_sd(std::span<const Scalar> v) {
    MeanSd out;
    if (v.empty()) return out;
    out.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<Scalar>(v.size());
    if (v.size() > 1) {
        Scalar sq = 0.0;
        for (const Scalar x : v) sq += (x - out.mean) * (x - out.mean);
        out.sd = std::sqrt(sq / static_cast<Scalar>(v.size() - 1));
    }
    return out;
}

// Sliding-window range for scalar paths, O(rows).
Scalar scalar_modulus(const RowMatrix& values, Eigen::Index window, Eigen::Index last) {
    std::deque<Eigen::Index> hi, lo;
    Scalar best = 0.0;
    for (Eigen::Index k = 0; k <= last; ++k) {
        const Scalar x = values(k, 0);
        while (!hi.empty() && values(hi.back(), 0) <= x) hi.pop_back();
        while (!lo.empty() && values(lo.back(), 0) >= x) lo.pop_back();
        hi.push_back(k);
        lo.push_back(k);
        while (hi.front() < k - window) hi.pop_front();
        while (lo.front() < k - window) lo.pop_front();
        best = std::max(best, values(hi.front(), 0) - values(lo.front(), 0));
    }
    return best;
}

Scalar vector_modulus(const RowMatrix& values, Eigen::Index window, Eigen::Index last) {
    Scalar best = 0.0;
    for (Eigen::Index k = 0; k <= last; ++k) {
        for (Eigen::Index j = std::max<Eigen::Index>(0, k - window); j < k; ++j) {
            best = std::max(best, (values.row(k) - values.row(j)).norm());
        }
    }
    return best;
}

}  // namespace

std::string to_string(Regressor regressor) {
    return regressor == Regressor::LogLnNOverN ? "log((ln n)/n)" : "log(1/n)";
}

Scalar regressor_value(Regressor regressor, Scalar level) {
    if (regressor == Regressor::LogInvN) {
        if (!(level > 0.0)) throw std::invalid_argument("log(1/n) needs n > 0");
        return -std::log(level);
    }
    if (!(level > 1.0)) throw std::invalid_argument("log((ln n)/n) needs n > 1");
    return std::log(std::log(level) / level);
}

void ErrorTable::validate() const {
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const ErrorRow& r = rows[i];
        if (i > 0 && !(r.level > rows[i - 1].level)) {
            throw std::invalid_argument("error table levels must be strictly increasing");
        }
        if (!(r.value >= 0.0)) throw std::invalid_argument("error table values must be >= 0");
        if (!std::isfinite(r.std_error)) {
            throw std::invalid_argument("error table standard errors must be finite");
        }
    }
}

RateReport fit_rate(const ErrorTable& table, Regressor regressor,
                    std::optional<SlopeBand> band) {
    table.validate();
    const std::size_t count = table.rows.size();
    if (count < 4) throw std::invalid_argument("rate fit needs at least four rows");
    Vector x(static_cast<Eigen::Index>(count));
    Vector y(static_cast<Eigen::Index>(count));
    for (std::size_t i = 0; i < count; ++i) {
        const ErrorRow& r = table.rows[i];
        if (!(r.value > 0.0)) {
            std::ostringstream msg;
            msg << "rate fit needs positive errors; row n = " << r.level << " has " << r.value;
            throw std::invalid_argument(msg.str());
        }
        x(static_cast<Eigen::Index>(i)) = regressor_value(regressor, r.level);
        y(static_cast<Eigen::Index>(i)) = std::log(r.value);
    }
    const Scalar mx = x.mean();
    const Scalar my = y.mean();
    const Vector dx = x.array() - mx;
    const Vector dy = y.array() - my;
    const Scalar sxx = dx.squaredNorm();
    if (!(sxx > 0.0)) throw std::invalid_argument("rate fit needs distinct levels");

    RateReport report;
    report.table = table;
    report.regressor = regressor;
    report.slope = dx.dot(dy) / sxx;
    report.intercept = my - report.slope * mx;
    report.residual = (y.array() - (report.slope * x.array() + report.intercept)).matrix().norm();
    report.rows_used = count;
    report.band = band;
    report.pass = !band || band->contains(report.slope);
    return report;
}

PooledNorm pooled_norm(std::span<const Scalar> per_path_powers, Scalar p) {
    if (per_path_powers.empty()) throw std::invalid_argument("no samples to pool");
    if (!(p >= 1.0)) throw std::invalid_argument("moment order p must be >= 1");
    const MeanSd stats = mean_sd(per_path_powers);
    PooledNorm out;
    if (stats.mean <= 0.0) return out;
    out.value = std::pow(stats.mean, 1.0 / p);
    // d/dm m^{1/p} = m^{1/p - 1} / p
    out.std_error = std::pow(stats.mean, 1.0 / p - 1.0) / p * stats.sd /
                    std::sqrt(static_cast<Scalar>(per_path_powers.size()));
    return out;
}

Scalar lp_sup_error(const RowMatrix& reference, const RowMatrix& approx, Scalar p) {
    if (!(p >= 1.0)) throw std::invalid_argument("moment order p must be >= 1");
    if (reference.rows() != approx.rows() || reference.cols() != approx.cols()) {
        std::ostringstream msg;
        msg << "grid mismatch: " << reference.rows() << "x" << reference.cols() << " vs "
            << approx.rows() << "x" << approx.cols();
        throw std::invalid_argument(msg.str());
    }
    return std::pow((reference - approx).rowwise().norm().maxCoeff(), p);
}

Scalar lp_sup_error(const ReflectedTrajectory& reference, const PenalizedTrajectory& approx,
                    Scalar p) {
    if (reference.grid.horizon() != approx.grid.horizon()) {
        throw std::invalid_argument("grid mismatch: trajectories cover different horizons");
    }
    const int ref_log2 = reference.grid.log2_steps();
    const int approx_log2 = approx.grid.log2_steps();
    if (ref_log2 == approx_log2) return lp_sup_error(reference.states, approx.states, p);
    if (ref_log2 < approx_log2) {
        return lp_sup_error(reference.states,
                            restrict_rows(approx.states, Eigen::Index{1} << (approx_log2 - ref_log2)),
                            p);
    }
    return lp_sup_error(restrict_rows(reference.states, Eigen::Index{1} << (ref_log2 - approx_log2)),
                        approx.states, p);
}

bool strictly_decreasing(const ErrorTable& table) {
    for (std::size_t i = 1; i < table.rows.size(); ++i) {
        if (!(table.rows[i].value < table.rows[i - 1].value)) return false;
    }
    return true;
}

bool decreasing_within_noise(const ErrorTable& table, Scalar sigmas) {
    for (std::size_t i = 1; i < table.rows.size(); ++i) {
        const ErrorRow& a = table.rows[i - 1];
        const ErrorRow& b = table.rows[i];
        const Scalar noise = sigmas * std::hypot(a.std_error, b.std_error);
        if (b.value >= a.value + noise && b.value >= a.value) return false;
    }
    return true;
}

Scalar modulus_of_continuity(const RowMatrix& values, Scalar step, Scalar delta,
                             Scalar horizon) {
    if (values.rows() == 0) throw std::invalid_argument("modulus of continuity of an empty path");
    if (!(step > 0.0)) throw std::invalid_argument("grid step must be positive");
    if (!(delta > 0.0) || !(delta <= horizon)) {
        throw std::invalid_argument("modulus of continuity needs 0 < delta <= T");
    }
    constexpr Scalar slack = 1e-9;
    const auto window = static_cast<Eigen::Index>(std::floor(delta / step + slack));
    const Eigen::Index last = std::min<Eigen::Index>(
        values.rows() - 1, static_cast<Eigen::Index>(std::floor(horizon / step + slack)));
    if (window == 0) return 0.0;
    return values.cols() == 1 ? scalar_modulus(values, window, last)
                              : vector_modulus(values, window, last);
}

Scalar ks_distance(std::vector<Scalar> a, std::vector<Scalar> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("KS distance of an empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const auto na = static_cast<Scalar>(a.size());
    const auto nb = static_cast<Scalar>(b.size());
    std::size_t i = 0, j = 0;
    Scalar best = 0.0;
    while (i < a.size() && j < b.size()) {
        const Scalar x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        best = std::max(best, std::abs(static_cast<Scalar>(i) / na - static_cast<Scalar>(j) / nb));
    }
    return best;
}

std::string to_string(WeakFunctional functional) {
    switch (functional) {
        case WeakFunctional::Mean: return "mean";
        case WeakFunctional::SecondMoment: return "second_moment";
        case WeakFunctional::CdfDistance: return "cdf_distance";
    }
    return "unknown";
}

WeakFunctional parse_weak_functional(const std::string& name) {
    if (name == "mean") return WeakFunctional::Mean;
    if (name == "second_moment") return WeakFunctional::SecondMoment;
    if (name == "cdf_distance") return WeakFunctional::CdfDistance;
    throw std::invalid_argument("unknown weak functional '" + name + "'");
}

std::vector<WeakRow> weak_compare(const SweepSpec& spec, WeakFunctional functional) {
    if (functional == WeakFunctional::CdfDistance && spec.coeffs.dim != 1) {
        throw DimensionError("empirical CDF distance needs a one-dimensional state");
    }
    SweepSpec with_ref = spec;
    with_ref.with_reference = true;
    return weak_compare(with_ref, run_sweep(with_ref), functional);
}

std::vector<WeakRow> weak_compare(const SweepSpec& spec, const std::vector<PathSample>& samples,
                                  WeakFunctional functional) {
    const Eigen::Index d = spec.coeffs.dim;
    if (functional == WeakFunctional::CdfDistance && d != 1) {
        throw DimensionError("empirical CDF distance needs a one-dimensional state");
    }
    if (samples.empty()) throw std::invalid_argument("weak comparison needs at least one path");
    const std::size_t paths = samples.size();
    const auto count = static_cast<Scalar>(paths);
    std::vector<WeakRow> rows;
    for (std::size_t j = 0; j < spec.levels.size(); ++j) {
        WeakRow row;
        row.level = spec.levels[j];
        switch (functional) {
            case WeakFunctional::Mean: {
                Vector mean_approx = Vector::Zero(d), mean_ref = Vector::Zero(d);
                for (const auto& s : samples) {
                    mean_approx += s.levels[j].terminal;
                    mean_ref += s.reference_terminal;
                }
                mean_approx /= count;
                mean_ref /= count;
                row.approx = d == 1 ? mean_approx(0) : mean_approx.norm();
                row.reference = d == 1 ? mean_ref(0) : mean_ref.norm();
                row.distance = (mean_approx - mean_ref).norm();
                // paired differences, coordinatewise variance
                Vector var = Vector::Zero(d);
                const Vector mean_diff = mean_approx - mean_ref;
                for (const auto& s : samples) {
                    const Vector diff = s.levels[j].terminal - s.reference_terminal - mean_diff;
                    var += diff.cwiseProduct(diff);
                }
                if (paths > 1) row.std_error = std::sqrt(var.sum() / (count - 1.0) / count);
                break;
            }
            case WeakFunctional::SecondMoment: {
                std::vector<Scalar> diff(paths);
                Scalar approx = 0.0, ref = 0.0;
                for (std::size_t i = 0; i < paths; ++i) {
                    const Scalar a = samples[i].levels[j].terminal.squaredNorm();
                    const Scalar r = samples[i].reference_terminal.squaredNorm();
                    approx += a;
                    ref += r;
                    diff[i] = a - r;
                }
                row.approx = approx / count;
                row.reference = ref / count;
                row.distance = std::abs(row.approx - row.reference);
                row.std_error = mean_sd(diff).sd / std::sqrt(count);
                break;
            }
            case WeakFunctional::CdfDistance: {
                std::vector<Scalar> a(paths), r(paths);
                for (std::size_t i = 0; i < paths; ++i) {
                    a[i] = samples[i].levels[j].terminal(0);
                    r[i] = samples[i].reference_terminal(0);
                }
                row.distance = ks_distance(a, r);
                row.approx = mean_sd(a).mean;
                row.reference = mean_sd(r).mean;
                // paired bootstrap over path indices, fixed seed
                constexpr int kReplicates = 200;
                std::mt19937_64 rng(spec.master_seed ^ 0x6b73'626f'6f74ULL ^ j);
                std::uniform_int_distribution<std::size_t> pick(0, paths - 1);
                std::vector<Scalar> boot(kReplicates);
                std::vector<Scalar> ba(paths), br(paths);
                for (int b = 0; b < kReplicates; ++b) {
                    for (std::size_t i = 0; i < paths; ++i) {
                        const std::size_t k = pick(rng);
                        ba[i] = a[k];
                        br[i] = r[k];
                    }
                    boot[static_cast<std::size_t>(b)] = ks_distance(ba, br);
                }
                row.std_error = mean_sd(boot).sd;
                break;
            }
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace reflect
