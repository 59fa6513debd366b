#include "slowfast/diagnostics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace slowfast {

namespace {

// stream tags: one per experiment family, so no two diagnostics ever share a
// replica stream even under identical (seed, eps index, replica)
constexpr std::uint64_t kTagStrong = 0x51;
constexpr std::uint64_t kTagWeak = 0x52;
constexpr std::uint64_t kTagCondE = 0x53;
constexpr std::uint64_t kTagU = 0x54;
constexpr std::uint64_t kTagNonCauchy = 0x55;
constexpr std::uint64_t kTagOuScaling = 0x56;

RngStream replica_stream(std::uint64_t seed, std::uint64_t tag,
                         std::uint64_t eps_idx, std::uint64_t replica,
                         std::uint64_t channel) {
    return RngStream(seed, compose_stream(tag, eps_idx, replica, channel));
}

MeanVar accumulate(const std::vector<double>& xs) {
    MeanVar mv;
    for (double x : xs) mv.add(x);
    return mv;
}

long macro_count(double T, double delta) {
    return std::max<long>(1, static_cast<long>(std::ceil(T / delta - 1e-9)));
}

std::string coord_name(const char* stem, int i) {
    std::ostringstream os;
    os << stem << '_' << i;
    return os.str();
}

} // namespace

void EpsLadder::validate() const {
    if (epsilons.empty()) throw std::invalid_argument("EpsLadder: empty ladder");
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
        if (!(epsilons[i] > 0.0 && epsilons[i] < 1.0))
            throw std::invalid_argument("EpsLadder: epsilon values must lie in (0, 1)");
        if (i > 0 && !(epsilons[i] < epsilons[i - 1]))
            throw std::invalid_argument("EpsLadder: epsilons must be strictly decreasing");
    }
    if (replicas < 2) throw std::invalid_argument("EpsLadder: need at least 2 replicas");
    if (threshold < 0.0) throw std::invalid_argument("EpsLadder: negative threshold");
    if (!(threshold_frac > 0.0)) throw std::invalid_argument("EpsLadder: threshold_frac must be positive");
    if (!(confidence > 0.0 && confidence < 1.0))
        throw std::invalid_argument("EpsLadder: confidence must lie in (0, 1)");
}

bool all_pass(const Report& report) {
    for (const auto& row : report)
        if (row.verdict == "fail") return false;
    return true;
}

bool any_inconclusive(const Report& report) {
    for (const auto& row : report)
        if (row.verdict == "inconclusive" || row.verdict == "degenerate") return true;
    return false;
}

void parallel_for(long n, int threads, const std::function<void(long)>& fn) {
    if (n <= 0) return;
    const int workers = static_cast<int>(std::min<long>(std::max(threads, 1), n));
    if (workers <= 1) {
        for (long i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<long> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto body = [&] {
        for (;;) {
            const long i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                next.store(n); // drain remaining work
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers) - 1);
    for (int w = 1; w < workers; ++w) pool.emplace_back(body);
    body();
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

Report strong_convergence(const Fixture& fx, const EpsLadder& ladder,
                          const ExperimentConfig& cfg, std::uint64_t seed,
                          int threads, double final_threshold) {
    ladder.validate();
    const AbstractModel& model = fx.model;
    if (!model.beta.is_zero())
        throw std::invalid_argument(
            "strong_convergence: model has a quadratic fast-fast term; "
            "pathwise coupling is only supported for beta = 0");
    const ReducedModel rm = build_reduced(model);
    const std::size_t E = ladder.epsilons.size();
    const int R = ladder.replicas;
    const double z = normal_quantile(0.5 * (1.0 + ladder.confidence));

    std::vector<std::vector<double>> sup_diff(E), sup_bar(E);
    std::vector<std::vector<char>> stopped(E);
    for (std::size_t e = 0; e < E; ++e) {
        const double eps = ladder.epsilons[e];
        ExperimentConfig cfg_e = cfg;
        cfg_e.epsilon = eps;
        cfg_e.validate();
        const double delta = cfg_e.macro_dt(eps);
        const long K = macro_count(cfg.T, delta);
        const double delta_eff = cfg.T / static_cast<double>(K);
        const long s = substeps_per_macro(delta_eff, cfg.substep_c, eps);
        const long N = K * s;
        OUParams params{eps, model.space};

        sup_diff[e].assign(static_cast<std::size_t>(R), 0.0);
        sup_bar[e].assign(static_cast<std::size_t>(R), 0.0);
        stopped[e].assign(static_cast<std::size_t>(R), 0);
        parallel_for(R, threads, [&](long r) {
            RngStream path_rng = replica_stream(seed, kTagStrong, e, static_cast<std::uint64_t>(r), 0);
            NoisePath path = build_path(params, cfg.T, cfg.substep_c, path_rng, N);
            PathD xe = simulate_fast_slow(model, cfg_e, path, s);
            MacroNoise macro = aggregate_increments(path, s);
            RngStream extra = replica_stream(seed, kTagStrong, e, static_cast<std::uint64_t>(r), 1);
            PathD xb = simulate_reduced(rm, cfg_e, macro, extra);
            if (xe.stopped || xb.stopped) {
                stopped[e][static_cast<std::size_t>(r)] = 1;
                return;
            }
            sup_diff[e][static_cast<std::size_t>(r)] = sup_distance(xe, xb);
            sup_bar[e][static_cast<std::size_t>(r)] = xb.sup_norm();
        });
    }

    // exceedance threshold: explicit, or a fraction of the typical reduced
    // path scale at the finest epsilon
    double delta_thr = ladder.threshold;
    if (delta_thr <= 0.0) {
        std::vector<double> scales;
        for (std::size_t e = E; e-- > 0;) {
            for (int r = 0; r < R; ++r)
                if (!stopped[e][static_cast<std::size_t>(r)])
                    scales.push_back(sup_bar[e][static_cast<std::size_t>(r)]);
            if (!scales.empty()) break; // finest epsilon with usable replicas
        }
        delta_thr = ladder.threshold_frac * median_of(scales);
        if (!(delta_thr > 0.0)) delta_thr = ladder.threshold_frac;
    }

    Report report;
    report.push_back(StatReport{"strong_delta", std::nullopt, delta_thr, 0.0, R, 0, "info"});

    std::vector<double> p_hat(E, 0.0), lo(E, 0.0), hi(E, 1.0);
    std::vector<char> usable(E, 1);
    for (std::size_t e = 0; e < E; ++e) {
        long n_stop = 0, k = 0, n_eff = 0;
        for (int r = 0; r < R; ++r) {
            if (stopped[e][static_cast<std::size_t>(r)]) {
                ++n_stop;
                continue;
            }
            ++n_eff;
            if (sup_diff[e][static_cast<std::size_t>(r)] > delta_thr) ++k;
        }
        WilsonInterval w = wilson(k, n_eff, z);
        p_hat[e] = w.p_hat;
        lo[e] = w.lo;
        hi[e] = w.hi;
        const bool conclusive = n_eff > 0 && n_stop <= R / 20;
        usable[e] = conclusive ? 1 : 0;
        report.push_back(StatReport{"strong_p_hat", ladder.epsilons[e], w.p_hat,
                                    0.5 * (w.hi - w.lo), R, n_stop,
                                    conclusive ? "info" : "inconclusive"});
    }

    bool trend_ok = true;
    for (std::size_t e = 0; e + 1 < E; ++e)
        if (p_hat[e + 1] > p_hat[e] && lo[e + 1] > hi[e]) trend_ok = false;
    const bool final_ok = p_hat[E - 1] < final_threshold;
    std::string verdict = (trend_ok && final_ok) ? "pass" : "fail";
    for (std::size_t e = 0; e < E; ++e)
        if (!usable[e]) verdict = "inconclusive";
    long total_stopped = 0;
    for (std::size_t e = 0; e < E; ++e)
        for (int r = 0; r < R; ++r) total_stopped += stopped[e][static_cast<std::size_t>(r)];
    report.push_back(StatReport{"strong_trend", ladder.epsilons.back(), p_hat[E - 1],
                                0.5 * (hi[E - 1] - lo[E - 1]),
                                static_cast<long>(E) * R, total_stopped, verdict});
    return report;
}

Report weak_convergence(const Fixture& fx, const EpsLadder& ladder,
                        const ExperimentConfig& cfg, std::uint64_t seed,
                        int threads) {
    ladder.validate();
    const AbstractModel& model = fx.model;
    ZeroMeanResult zm = validate_zero_mean(model.beta, model.space.q);
    if (!zm.pass) {
        std::ostringstream os;
        os << "weak_convergence: zero-mean condition fails (max residual "
           << zm.residual.cwiseAbs().maxCoeff() << ")";
        throw std::invalid_argument(os.str());
    }
    const ReducedModel rm = build_reduced(model);
    const std::size_t E = ladder.epsilons.size();
    const int R = ladder.replicas;
    const int d = model.space.d;
    const double z = normal_quantile(0.5 * (1.0 + ladder.confidence));

    const double eps_min = ladder.epsilons.back();
    ExperimentConfig cfg_min = cfg;
    cfg_min.epsilon = eps_min;
    cfg_min.validate();
    const double delta = cfg_min.macro_dt(eps_min);
    const long K = macro_count(cfg.T, delta);

    // two independent reduced-equation batches: A for the comparison, B for
    // the null calibration of the KS statistic
    std::vector<Mat> bar(2, Mat::Zero(R, d));
    std::vector<std::vector<char>> bar_stopped(2, std::vector<char>(static_cast<std::size_t>(R), 0));
    for (int a = 0; a < 2; ++a) {
        parallel_for(R, threads, [&](long r) {
            RngStream wiener = replica_stream(seed, kTagWeak, 0xA0u + static_cast<std::uint64_t>(a),
                                              static_cast<std::uint64_t>(r), 0);
            MacroNoise macro = sample_wiener(model.space, cfg.T, K, wiener);
            RngStream extra = replica_stream(seed, kTagWeak, 0xA0u + static_cast<std::uint64_t>(a),
                                             static_cast<std::uint64_t>(r), 1);
            PathD xb = simulate_reduced(rm, cfg_min, macro, extra);
            if (xb.stopped) {
                bar_stopped[static_cast<std::size_t>(a)][static_cast<std::size_t>(r)] = 1;
                return;
            }
            bar[static_cast<std::size_t>(a)].row(r) = xb.final_value().transpose();
        });
    }
    auto batch_column = [&](int a, int i) {
        std::vector<double> xs;
        xs.reserve(static_cast<std::size_t>(R));
        for (int r = 0; r < R; ++r)
            if (!bar_stopped[static_cast<std::size_t>(a)][static_cast<std::size_t>(r)])
                xs.push_back(bar[static_cast<std::size_t>(a)](r, i));
        return xs;
    };
    long bar_stops = 0;
    for (int a = 0; a < 2; ++a)
        for (int r = 0; r < R; ++r) bar_stops += bar_stopped[static_cast<std::size_t>(a)][static_cast<std::size_t>(r)];

    Report report;
    // per-epsilon statistics; trend bookkeeping per coordinate
    Mat mean_gap(E, d), mean_gap_se(E, d), var_gap(E, d), var_gap_se(E, d), ks_val(E, d);
    std::vector<long> eps_stops(E, 0);
    for (std::size_t e = 0; e < E; ++e) {
        const double eps = ladder.epsilons[e];
        ExperimentConfig cfg_e = cfg;
        cfg_e.epsilon = eps;
        cfg_e.validate();
        OUParams params{eps, model.space};

        Mat fin = Mat::Zero(R, d);
        std::vector<char> stopped(static_cast<std::size_t>(R), 0);
        parallel_for(R, threads, [&](long r) {
            RngStream path_rng = replica_stream(seed, kTagWeak, e, static_cast<std::uint64_t>(r), 0);
            NoisePath path = build_path(params, cfg.T, cfg.substep_c, path_rng);
            PathD xe = simulate_fast_slow(model, cfg_e, path, path.N);
            if (xe.stopped) {
                stopped[static_cast<std::size_t>(r)] = 1;
                return;
            }
            fin.row(r) = xe.final_value().transpose();
        });
        long n_stop = 0;
        for (int r = 0; r < R; ++r) n_stop += stopped[static_cast<std::size_t>(r)];
        eps_stops[e] = n_stop;
        const bool conclusive = n_stop <= R / 20 && bar_stops <= (2 * R) / 20;
        const char* info = conclusive ? "info" : "inconclusive";

        for (int i = 0; i < d; ++i) {
            std::vector<double> xs;
            xs.reserve(static_cast<std::size_t>(R));
            for (int r = 0; r < R; ++r)
                if (!stopped[static_cast<std::size_t>(r)]) xs.push_back(fin(r, i));
            std::vector<double> ys = batch_column(0, i);
            MeanVar mx = accumulate(xs), my = accumulate(ys);
            mean_gap(e, i) = std::abs(mx.mean - my.mean);
            mean_gap_se(e, i) = std::sqrt(mx.se() * mx.se() + my.se() * my.se());
            const double vx = mx.variance(), vy = my.variance();
            var_gap(e, i) = std::abs(vx - vy);
            const double sx = vx * std::sqrt(2.0 / std::max<long>(mx.n - 1, 1));
            const double sy = vy * std::sqrt(2.0 / std::max<long>(my.n - 1, 1));
            var_gap_se(e, i) = std::sqrt(sx * sx + sy * sy);
            ks_val(e, i) = ks_statistic(xs, ys);
            const double ks_se =
                0.5 * std::sqrt(static_cast<double>(xs.size() + ys.size()) /
                                std::max(1.0, static_cast<double>(xs.size()) *
                                                  static_cast<double>(ys.size())));
            report.push_back(StatReport{coord_name("weak_mean_gap", i), eps, mean_gap(e, i),
                                        mean_gap_se(e, i), R, n_stop, info});
            report.push_back(StatReport{coord_name("weak_var_gap", i), eps, var_gap(e, i),
                                        var_gap_se(e, i), R, n_stop, info});
            report.push_back(StatReport{coord_name("weak_ks", i), eps, ks_val(e, i), ks_se, R,
                                        n_stop, info});
        }
    }

    // null KS between the two independent reduced batches
    double ks_null_max = 0.0;
    for (int i = 0; i < d; ++i) {
        std::vector<double> a = batch_column(0, i), b = batch_column(1, i);
        const double ks0 = ks_statistic(a, b);
        ks_null_max = std::max(ks_null_max, ks0);
        const double ks_se = 0.5 * std::sqrt(static_cast<double>(a.size() + b.size()) /
                                             std::max(1.0, static_cast<double>(a.size()) *
                                                               static_cast<double>(b.size())));
        report.push_back(StatReport{coord_name("weak_ks_null", i), std::nullopt, ks0, ks_se,
                                    R, bar_stops, "info"});
    }

    long total_stops = bar_stops;
    for (std::size_t e = 0; e < E; ++e) total_stops += eps_stops[e];
    const bool conclusive = total_stops <= (static_cast<long>(E) + 2) * R / 20;

    // trend rows: gaps must be nonincreasing in epsilon up to combined SE slack
    auto trend_verdict = [&](const Mat& gap, const Mat& gse) {
        for (int i = 0; i < d; ++i)
            for (std::size_t e = 0; e + 1 < E; ++e) {
                const double slack = z * (gse(e, i) + gse(e + 1, i));
                if (gap(e + 1, i) > gap(e, i) + slack) return false;
            }
        return true;
    };
    const double final_mean_gap = mean_gap.row(E - 1).maxCoeff();
    const double final_mean_se = mean_gap_se.row(E - 1).maxCoeff();
    const double final_var_gap = var_gap.row(E - 1).maxCoeff();
    const double final_var_se = var_gap_se.row(E - 1).maxCoeff();
    report.push_back(StatReport{"weak_mean_trend", eps_min, final_mean_gap, final_mean_se,
                                static_cast<long>(E) * R, total_stops,
                                !conclusive        ? "inconclusive"
                                : trend_verdict(mean_gap, mean_gap_se) ? "pass"
                                                                       : "fail"});
    report.push_back(StatReport{"weak_var_trend", eps_min, final_var_gap, final_var_se,
                                static_cast<long>(E) * R, total_stops,
                                !conclusive       ? "inconclusive"
                                : trend_verdict(var_gap, var_gap_se) ? "pass"
                                                                     : "fail"});
    const double ks_final = ks_val.row(E - 1).maxCoeff();
    const double ratio = ks_final / std::max(ks_null_max, 1e-12);
    report.push_back(StatReport{"weak_ks_final", eps_min, ratio, 0.0,
                                static_cast<long>(E) * R, total_stops,
                                !conclusive ? "inconclusive" : (ratio <= 2.0 ? "pass" : "fail")});
    return report;
}

StatReport check_cond_exp(const SpaceSpec& space, double Delta, double eps,
                          double y_l0, double y_m0, int l, int m,
                          int replicas, std::uint64_t seed, int threads) {
    space.validate();
    if (!(eps > 0.0 && eps < 1.0))
        throw std::invalid_argument("check_cond_exp: eps must lie in (0, 1)");
    if (!(Delta >= 0.0 && Delta < 1.0))
        throw std::invalid_argument("check_cond_exp: Delta must lie in [0, 1)");
    if (l < 0 || l >= space.M || m < 0 || m >= space.M)
        throw std::invalid_argument("check_cond_exp: mode index out of range");
    if (l == m && y_l0 != y_m0)
        throw std::invalid_argument("check_cond_exp: equal modes need equal start values");
    if (replicas < 2) throw std::invalid_argument("check_cond_exp: need at least 2 replicas");

    const double e2 = eps * eps;
    const double e1 = std::exp(-Delta / e2);
    double closed = 0.5 * e2 * e2 * y_l0 * y_m0 * (e1 - 1.0) * (e1 - 1.0);
    if (l == m)
        closed += 0.5 * space.q[m] * (Delta + e2 * (-1.5 + 2.0 * e1 - 0.5 * e1 * e1));

    if (Delta == 0.0)
        return StatReport{"cond_exp", eps, 0.0, 0.0, replicas, 0, "pass"};

    const long Nst = std::max<long>(1, static_cast<long>(std::ceil(Delta / (e2 / 50.0))));
    const double h = Delta / static_cast<double>(Nst);
    const double a = std::exp(-h / e2);
    const double vr_unit = -std::expm1(-2.0 * h / e2) / (2.0 * e2);
    const double sd_l = std::sqrt(space.q[l] * vr_unit);
    const double sd_m = std::sqrt(space.q[m] * vr_unit);

    std::vector<double> samples(static_cast<std::size_t>(replicas), 0.0);
    parallel_for(replicas, threads, [&](long r) {
        RngStream rng = replica_stream(seed, kTagCondE, 0, static_cast<std::uint64_t>(r), 0);
        double yl = y_l0, ym = y_m0;
        double A = 0.0, I = 0.0;
        for (long n = 0; n < Nst; ++n) {
            const double yl_prev = yl, ym_prev = ym;
            if (l == m) {
                yl = a * yl + rng.normal(sd_l);
                ym = yl;
            } else {
                yl = a * yl + rng.normal(sd_l);
                ym = a * ym + rng.normal(sd_m);
            }
            const double A_next = A + 0.5 * h * (yl_prev + yl);
            I += 0.5 * h * (A * ym_prev + A_next * ym);
            A = A_next;
        }
        samples[static_cast<std::size_t>(r)] = I;
    });

    MeanVar mv = accumulate(samples);
    const double dev = mv.mean - closed;
    const double se = mv.se();
    const bool ok = se > 0.0 ? std::abs(dev) <= 3.0 * se : dev == 0.0;
    return StatReport{"cond_exp", eps, dev, se, replicas, 0, ok ? "pass" : "fail"};
}

Report check_u_moments(const Bilinear& beta, const SpaceSpec& space, double T,
                       double eps, int replicas, std::uint64_t seed, int threads,
                       double substep_c) {
    space.validate();
    if (!(T > 0.0)) throw std::invalid_argument("check_u_moments: T must be positive");
    if (replicas < 2) throw std::invalid_argument("check_u_moments: need at least 2 replicas");
    const Bilinear beta_s = symmetrize_in_last_two(beta);
    ZeroMeanResult zm = validate_zero_mean(beta_s, space.q);
    if (!zm.pass) {
        std::ostringstream os;
        os << "check_u_moments: zero-mean condition fails (max residual "
           << zm.residual.cwiseAbs().maxCoeff() << ")";
        throw std::invalid_argument(os.str());
    }
    const int d = beta_s.out;
    if (beta_s.is_zero()) { // U is identically zero: nothing to simulate
        Report report;
        for (int i = 0; i < d; ++i)
            report.push_back(StatReport{coord_name("u_mean", i), eps, 0.0, 0.0, replicas, 0, "pass"});
        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j) {
                std::ostringstream os;
                os << "u_second_" << i << '_' << j;
                report.push_back(StatReport{os.str(), eps, 0.0, 0.0, replicas, 0, "pass"});
            }
        return report;
    }
    OUParams params{eps, space};

    Mat U = Mat::Zero(replicas, d);
    parallel_for(replicas, threads, [&](long r) {
        RngStream rng = replica_stream(seed, kTagU, 0, static_cast<std::uint64_t>(r), 0);
        NoisePath path = build_path(params, T, substep_c, rng);
        Vec acc = Vec::Zero(d);
        Vec y = path.y_at(0);
        acc += 0.5 * apply_bilinear(beta_s, y, y);
        for (long n = 1; n < path.N; ++n) {
            y = path.y_at(n);
            acc += apply_bilinear(beta_s, y, y);
        }
        y = path.y_at(path.N);
        acc += 0.5 * apply_bilinear(beta_s, y, y);
        U.row(r) = (eps * path.h * acc).transpose();
    });

    const double bracket = T + 0.5 * eps * eps * std::expm1(-2.0 * T / (eps * eps));
    Report report;
    for (int i = 0; i < d; ++i) {
        MeanVar mv;
        for (int r = 0; r < replicas; ++r) mv.add(U(r, i));
        const double se = mv.se();
        const bool ok = se > 0.0 ? std::abs(mv.mean) <= 5.0 * se : mv.mean == 0.0;
        report.push_back(StatReport{coord_name("u_mean", i), eps, mv.mean, se, replicas, 0,
                                    ok ? "pass" : "fail"});
    }
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
            double closed = 0.0;
            for (int lq = 0; lq < space.M; ++lq)
                for (int mq = 0; mq < space.M; ++mq)
                    closed += beta_s.at(i, lq, mq) * beta_s.at(j, lq, mq) *
                              space.q[lq] * space.q[mq];
            closed *= 0.5 * bracket;
            MeanVar mv;
            for (int r = 0; r < replicas; ++r) mv.add(U(r, i) * U(r, j));
            const double dev = mv.mean - closed;
            const double se = mv.se();
            const bool ok = se > 0.0 ? std::abs(dev) <= 3.0 * se : dev == 0.0;
            std::ostringstream os;
            os << "u_second_" << i << '_' << j;
            report.push_back(StatReport{os.str(), eps, dev, se, replicas, 0,
                                        ok ? "pass" : "fail"});
        }
    return report;
}

StatReport check_non_cauchy(const Bilinear& beta, const SpaceSpec& space,
                            double T, double eps, double ratio, int replicas,
                            std::uint64_t seed, int threads, double substep_c) {
    space.validate();
    if (!(T > 0.0)) throw std::invalid_argument("check_non_cauchy: T must be positive");
    if (!(ratio >= 1.0)) throw std::invalid_argument("check_non_cauchy: ratio must be >= 1");
    const double eps_b = ratio * eps;
    if (!(eps > 0.0 && eps_b < 1.0))
        throw std::invalid_argument("check_non_cauchy: both epsilons must lie in (0, 1)");
    if (replicas < 2) throw std::invalid_argument("check_non_cauchy: need at least 2 replicas");
    const Bilinear beta_s = symmetrize_in_last_two(beta);
    const int d = beta_s.out;

    const double gap = (eps_b - eps) * (eps_b - eps) / (eps * eps + eps_b * eps_b);
    double bound = 0.0;
    for (int i = 0; i < d; ++i)
        for (int lq = 0; lq < space.M; ++lq)
            for (int mq = 0; mq < space.M; ++mq) {
                const double b = beta_s.at(i, lq, mq);
                bound += b * b * space.q[lq] * space.q[mq];
            }
    bound *= T * gap;
    if (beta_s.is_zero()) // both integrals are identically zero
        return StatReport{"non_cauchy", eps, 0.0, 0.0, replicas, 0, "pass"};

    const long N = std::max<long>(1, static_cast<long>(std::ceil(T / (substep_c * eps * eps))));
    const double h = T / static_cast<double>(N);

    std::vector<double> sup_sq(static_cast<std::size_t>(replicas), 0.0);
    parallel_for(replicas, threads, [&](long r) {
        RngStream rng = replica_stream(seed, kTagNonCauchy, 0, static_cast<std::uint64_t>(r), 0);
        OUPair pair = sample_stationary_pair(space, eps, eps_b, rng);
        Vec D = Vec::Zero(d);
        Vec dw(space.M), v(space.M);
        double sup = 0.0;
        for (long n = 0; n < N; ++n) {
            v = eps * pair.ya - eps_b * pair.yb; // left endpoint of the Ito sum
            step_joint_pair(space, pair, h, rng, dw);
            D += apply_bilinear(beta_s, v, dw);
            sup = std::max(sup, D.squaredNorm());
        }
        sup_sq[static_cast<std::size_t>(r)] = sup;
    });

    MeanVar mv = accumulate(sup_sq);
    const bool ok = mv.mean >= 0.5 * bound;
    return StatReport{"non_cauchy", eps, mv.mean, mv.se(), replicas, 0,
                      ok ? "pass" : "fail"};
}

StatReport check_ou_scaling(const SpaceSpec& space,
                            const std::vector<double>& epsilons, double p,
                            double T, int replicas, std::uint64_t seed,
                            int threads, double substep_c) {
    if (epsilons.size() < 3)
        throw std::invalid_argument("check_ou_scaling: need at least 3 ladder points");
    for (std::size_t e = 0; e < epsilons.size(); ++e) {
        if (!(epsilons[e] > 0.0 && epsilons[e] < 1.0))
            throw std::invalid_argument("check_ou_scaling: epsilons must lie in (0, 1)");
        if (e > 0 && !(epsilons[e] < epsilons[e - 1]))
            throw std::invalid_argument("check_ou_scaling: epsilons must be strictly decreasing");
    }
    if (!(p > 0.0)) throw std::invalid_argument("check_ou_scaling: p must be positive");
    if (!(T > 0.0)) throw std::invalid_argument("check_ou_scaling: T must be positive");
    if (replicas < 2) throw std::invalid_argument("check_ou_scaling: need at least 2 replicas");
    if (space.q.size() == 0 || space.q.maxCoeff() <= 0.0)
        return StatReport{"ou_scaling", std::nullopt, 0.0, 0.0, 0, 0, "degenerate"};
    space.validate();

    std::vector<double> log_eps, log_moment;
    for (std::size_t e = 0; e < epsilons.size(); ++e) {
        const double eps = epsilons[e];
        OUParams params{eps, space};
        std::vector<double> sup_p(static_cast<std::size_t>(replicas), 0.0);
        parallel_for(replicas, threads, [&](long r) {
            RngStream rng = replica_stream(seed, kTagOuScaling, e, static_cast<std::uint64_t>(r), 0);
            NoisePath path = build_path(params, T, substep_c, rng);
            std::vector<double> norm_sq(static_cast<std::size_t>(path.N + 1), 0.0);
            for (int m = 0; m < path.M; ++m) {
                const double* ym = path.Y.data() + static_cast<std::size_t>(m) * (path.N + 1);
                for (long n = 0; n <= path.N; ++n) norm_sq[static_cast<std::size_t>(n)] += ym[n] * ym[n];
            }
            double sup = 0.0;
            for (long n = 0; n <= path.N; ++n) sup = std::max(sup, norm_sq[static_cast<std::size_t>(n)]);
            sup_p[static_cast<std::size_t>(r)] = std::pow(sup, 0.5 * p);
        });
        log_eps.push_back(std::log(eps));
        log_moment.push_back(std::log(mean_of(sup_p)) / p);
    }
    auto [slope, slope_se] = ls_slope(log_eps, log_moment);
    const bool ok = std::abs(slope + 1.0) <= 0.15;
    return StatReport{"ou_scaling", std::nullopt, slope, slope_se,
                      static_cast<long>(epsilons.size()) * replicas, 0,
                      ok ? "pass" : "fail"};
}

Vec correction_discrepancy(const ClimateModel& cm) {
    const int d = cm.space.d, M = cm.space.M;
    Vec disc = Vec::Zero(d);
    for (int i = 0; i < d; ++i) {
        double acc = 0.0;
        for (int m = 0; m < M; ++m) {
            double inner = 0.0;
            for (int j = 0; j < d; ++j) inner += cm.B112.at(i, j, m) * cm.A12(j, m);
            acc += cm.space.q[m] * inner;
        }
        disc[i] = 0.5 * acc;
    }
    return disc;
}

StatReport correction_discrepancy_report(const ClimateModel& cm) {
    const Vec disc = correction_discrepancy(cm);
    const double worst = disc.size() > 0 ? disc.cwiseAbs().maxCoeff() : 0.0;
    return StatReport{"correction_discrepancy", std::nullopt, worst, 0.0, 1, 0, "pass"};
}

} // namespace slowfast
