#include "znwrap/cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>

#include "CLI11.hpp"
#include "znwrap/experiments.hpp"
#include "znwrap/fourier.hpp"
#include "znwrap/io.hpp"
#include "znwrap/report.hpp"

namespace znwrap {

namespace {

std::int64_t i64(std::uint64_t v) { return static_cast<std::int64_t>(v); }

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    require_arg(f.good(), "cannot open output file " + path);
    f << text;
    if (text.empty() || text.back() != '\n') f << '\n';
}

void put_wrap_stats(ExperimentReport& rep, const WrapStats& st) {
    rep.results["omega"] = st.omega;
    rep.results["epsilon"] = st.epsilon;
    rep.results["delta_used"] = st.delta;
    rep.results["dim"] = i64(st.dim);
    rep.results["retries"] = static_cast<std::int64_t>(st.retries);
    rep.results["wrapper_size"] = i64(st.wrapper_size);
    rep.results["exceptional_size"] = i64(st.exceptional_size);
    rep.results["fallback_coarse"] = st.fallback_coarse;
    if (std::isfinite(st.level_lo)) rep.results["level_lo"] = st.level_lo;
    rep.results["level_hi"] = st.level_hi;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"randomized character-sampling wrappers over Z_N"};
    app.require_subcommand(1);

    std::string out_path, format = "json";
    bool timing = false;
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--out", out_path, "write the report to this file");
        cmd->add_option("--format", format, "report format")
            ->check(CLI::IsMember({"json", "csv"}));
        cmd->add_flag("--timing", timing, "embed wall-clock runtime_ms");
    };

    std::function<ExperimentReport()> body;

    // ---- spectral basics ----------------------------------------------
    std::string set_spec, a_spec, b_spec;
    {
        CLI::App* c = app.add_subcommand("dft", "spectrum of an indicator function");
        c->add_option("--set", set_spec, "set spec (file, JSON, or N:r1,r2,...)")
            ->required();
        add_common(c);
        c->callback([&] {
            body = [&] {
                const GroupSet s = load_set_spec(set_spec);
                const SpectralFunction f = SpectralFunction::indicator(s);
                const auto& spec = f.spectrum();
                double max_nontrivial = 0;
                for (std::size_t r = 1; r < spec.size(); ++r) {
                    max_nontrivial = std::max(max_nontrivial, std::abs(spec[r]));
                }
                ExperimentReport rep;
                rep.command = "dft";
                rep.params["N"] = i64(s.modulus());
                rep.params["size"] = i64(s.size());
                rep.results["wiener"] = wiener_norm(f);
                rep.results["dc"] = std::abs(spec[0]);
                rep.results["max_nontrivial"] = max_nontrivial;
                if (s.modulus() <= 4096) {
                    ReportTable t;
                    t.columns = {"r", "re", "im", "abs"};
                    for (std::size_t r = 0; r < spec.size(); ++r) {
                        t.rows.push_back({static_cast<double>(r), spec[r].real(),
                                          spec[r].imag(), std::abs(spec[r])});
                    }
                    rep.table = std::move(t);
                }
                return rep;
            };
        });
    }
    {
        CLI::App* c = app.add_subcommand("convolve", "exact convolution counts");
        c->add_option("--a", a_spec, "first set")->required();
        c->add_option("--b", b_spec, "second set")->required();
        add_common(c);
        c->callback([&] {
            body = [&] {
                const GroupSet a = load_set_spec(a_spec);
                const GroupSet b = load_set_spec(b_spec);
                const ConvolutionTable conv = convolution_counts(a, b);
                std::int64_t maxc = 0, support = 0;
                for (std::int64_t v : conv.counts) {
                    maxc = std::max(maxc, v);
                    support += v > 0;
                }
                ExperimentReport rep;
                rep.command = "convolve";
                rep.params["N"] = i64(a.modulus());
                rep.params["size_a"] = i64(a.size());
                rep.params["size_b"] = i64(b.size());
                rep.results["max_count"] = maxc;
                rep.results["support"] = support;
                if (a.modulus() <= 4096) {
                    ReportTable t;
                    t.columns = {"x", "count"};
                    for (std::size_t x = 0; x < conv.counts.size(); ++x) {
                        t.rows.push_back({static_cast<double>(x),
                                          static_cast<double>(conv.counts[x])});
                    }
                    rep.table = std::move(t);
                }
                return rep;
            };
        });
    }
    {
        CLI::App* c = app.add_subcommand("wiener", "Wiener norm of an indicator");
        c->add_option("--set", set_spec, "set spec")->required();
        add_common(c);
        c->callback([&] {
            body = [&] {
                const GroupSet s = load_set_spec(set_spec);
                ExperimentReport rep;
                rep.command = "wiener";
                rep.params["N"] = i64(s.modulus());
                rep.params["size"] = i64(s.size());
                rep.results["wiener"] = wiener_norm(s);
                rep.results["density"] = s.density();
                return rep;
            };
        });
    }

    std::uint64_t n_mod = 0, samples = 200, seed = 1;
    {
        CLI::App* c = app.add_subcommand("west", "lower estimate of w(Z_N)");
        c->add_option("--N", n_mod, "modulus")->required();
        c->add_option("--samples", samples, "random (r, arc) draws");
        c->add_option("--seed", seed, "RNG seed");
        add_common(c);
        c->callback([&] {
            body = [&] {
                ExperimentReport rep;
                rep.command = "west";
                rep.seed = seed;
                rep.params["N"] = i64(n_mod);
                rep.params["samples"] = i64(samples);
                rep.results["estimate"] = estimate_w(n_mod, samples, seed);
                return rep;
            };
        });
    }

    std::uint64_t prime = 0, kl_a = 1, kl_b = 1;
    bool kl_sweep = false;
    {
        CLI::App* c = app.add_subcommand("kloosterman", "Kloosterman sums and Weil bound");
        c->add_option("--p", prime, "prime modulus")->required();
        c->add_option("--a", kl_a, "first parameter");
        c->add_option("--b", kl_b, "second parameter");
        c->add_flag("--sweep", kl_sweep, "all (a, b) in F_p^* x F_p^*");
        add_common(c);
        c->callback([&] {
            body = [&] {
                ExperimentReport rep;
                rep.command = "kloosterman";
                rep.params["p"] = i64(prime);
                if (kl_sweep) {
                    const KloostermanSweep sw = kloosterman_sweep(prime);
                    rep.results["max_magnitude"] = sw.max_magnitude;
                    rep.results["weil_bound"] = sw.weil_bound;
                    rep.results["arg_a"] = i64(sw.arg_a);
                    rep.results["arg_b"] = i64(sw.arg_b);
                    rep.results["violations"] = i64(sw.violations);
                    if (prime <= 101) {  // one row per (a, b); p^3 work, keep it small
                        ReportTable t;
                        t.columns = {"a", "b", "re", "im", "magnitude"};
                        for (std::uint64_t a = 1; a < prime; ++a) {
                            for (std::uint64_t b = 1; b < prime; ++b) {
                                const KloostermanValue kv = kloosterman_sum(a, b, prime);
                                t.rows.push_back({static_cast<double>(a),
                                                  static_cast<double>(b), kv.value.real(),
                                                  kv.value.imag(), kv.magnitude});
                            }
                        }
                        rep.table = std::move(t);
                    }
                } else {
                    const KloostermanValue kv = kloosterman_sum(kl_a, kl_b, prime);
                    rep.params["a"] = i64(kl_a);
                    rep.params["b"] = i64(kl_b);
                    rep.results["re"] = kv.value.real();
                    rep.results["im"] = kv.value.imag();
                    rep.results["magnitude"] = kv.magnitude;
                    rep.results["weil_bound"] = kv.weil_bound;
                }
                return rep;
            };
        });
    }

    // ---- decomposition and wrappers ------------------------------------
    double delta = 0, xi = 0.01, eta = 0, l1 = 0, l2 = 0, grid = 0;
    DecomposeConfig dcfg;
    {
        CLI::App* c = app.add_subcommand("decompose",
                                         "character-sampling decomposition f = g+h+k");
        c->add_option("--set", set_spec, "set spec; f is its indicator")->required();
        c->add_option("--delta", delta, "target accuracy")->required();
        c->add_option("--xi", xi, "exceptional-set fraction");
        c->add_option("--seed", seed, "RNG seed");
        c->add_option("--grid", grid, "value grid (0: delta)");
        c->add_option("--d-cap-factor", dcfg.d_cap_factor, "cap factor for d");
        add_common(c);
        c->callback([&] {
            body = [&] {
                const GroupSet s = load_set_spec(set_spec);
                DecomposeConfig cfg = dcfg;
                cfg.grid_step = grid;
                const Decomposition dec =
                    decompose(SpectralFunction::indicator(s), delta, xi, cfg, seed);
                ExperimentReport rep;
                rep.command = "decompose";
                rep.seed = seed;
                rep.params["N"] = i64(s.modulus());
                rep.params["size"] = i64(s.size());
                rep.params["delta"] = delta;
                rep.params["xi"] = xi;
                rep.results["wiener"] = dec.wiener;
                rep.results["epsilon"] = dec.epsilon;
                rep.results["arcs"] = i64(dec.arcs.arc_count);
                rep.results["dim"] = i64(dec.dim);
                rep.results["retries"] = static_cast<std::int64_t>(dec.retries);
                rep.results["blocks"] = i64(dec.blocks->block_count());
                rep.results["exceptional_size"] = i64(dec.exceptional.size());
                rep.results["achieved_h_inf"] = dec.achieved_h_inf;
                rep.results["h_ceiling"] = dcfg.h_inf_factor * delta;
                rep.results["grid"] = dec.grid;
                return rep;
            };
        });
    }

    std::string wrap_mode = "threshold", wrapper_out;
    {
        CLI::App* c = app.add_subcommand("wrap", "wrap a level set, threshold set, or "
                                                 "partial-sumset complement");
        c->add_option("--mode", wrap_mode, "level | threshold | sumset")
            ->check(CLI::IsMember({"level", "threshold", "sumset"}));
        c->add_option("--set", set_spec, "set spec (level/threshold modes)");
        c->add_option("--a", a_spec, "first set (sumset mode)");
        c->add_option("--b", b_spec, "second set (sumset mode)");
        c->add_option("--l1", l1, "level band low end (level mode)");
        c->add_option("--l2", l2, "level band high end (level mode)");
        c->add_option("--eta", eta, "threshold (threshold/sumset modes)");
        c->add_option("--delta", delta, "wrapping width")->required();
        c->add_option("--xi", xi, "exceptional-set fraction");
        c->add_option("--seed", seed, "RNG seed");
        c->add_option("--wrapper-out", wrapper_out, "write the wrapper JSON here");
        add_common(c);
        c->callback([&] {
            body = [&] {
                WrapResult res = [&] {
                    if (wrap_mode == "sumset") {
                        require_arg(!a_spec.empty() && !b_spec.empty(),
                                    "wrap: sumset mode needs --a and --b");
                        return wrap_sumset_complement(load_set_spec(a_spec),
                                                      load_set_spec(b_spec), eta, delta,
                                                      xi, seed);
                    }
                    require_arg(!set_spec.empty(), "wrap: need --set");
                    const SpectralFunction f =
                        SpectralFunction::indicator(load_set_spec(set_spec));
                    if (wrap_mode == "level") {
                        return wrap_level_set(f, l1, l2, delta, xi, seed);
                    }
                    return wrap_threshold(f, eta, delta, xi, seed);
                }();
                ExperimentReport rep;
                rep.command = "wrap";
                rep.seed = seed;
                rep.params["mode"] = wrap_mode;
                rep.params["delta"] = delta;
                rep.params["xi"] = xi;
                if (wrap_mode == "level") {
                    rep.params["l1"] = l1;
                    rep.params["l2"] = l2;
                } else {
                    rep.params["eta"] = eta;
                }
                put_wrap_stats(rep, res.stats);
                if (!wrapper_out.empty()) {
                    write_text_file(wrapper_out, wrapper_to_json(res.wrapper));
                }
                return rep;
            };
        });
    }

    // ---- constructions and experiments ---------------------------------
    std::string kind = "ninth", set_out;
    double lambda = 0.4, pollard_eps = 0, opt_eps = -1, t_param = 0;
    {
        CLI::App* c = app.add_subcommand("construct", "extremal constructions over F_p");
        c->add_option("--kind", kind, "eighth | ninth | lambda")
            ->check(CLI::IsMember({"eighth", "ninth", "lambda"}))
            ->required();
        c->add_option("--p", prime, "prime modulus")->required();
        c->add_option("--lambda", lambda, "interval fraction (lambda kind)");
        c->add_option("--set-out", set_out, "write the set JSON here");
        add_common(c);
        c->callback([&] {
            body = [&] {
                const ExtremalKind k = kind == "eighth" ? ExtremalKind::eighth
                                       : kind == "ninth" ? ExtremalKind::ninth
                                                         : ExtremalKind::lambda;
                const GroupSet a = construct_extremal(
                    k, prime,
                    k == ExtremalKind::lambda ? std::optional<double>(lambda)
                                              : std::nullopt);
                const double target = k == ExtremalKind::eighth  ? 1.0 / 8
                                      : k == ExtremalKind::ninth ? 1.0 / 9
                                                                 : lambda * lambda;
                ExperimentReport rep;
                rep.command = "construct";
                rep.params["p"] = i64(prime);
                rep.params["kind"] = kind;
                if (k == ExtremalKind::lambda) rep.params["lambda"] = lambda;
                rep.results["size"] = i64(a.size());
                rep.results["density"] = a.density();
                rep.results["target_density"] = target;
                rep.results["deviation"] = std::abs(a.density() - target);
                std::vector<std::int64_t> rs;
                for (std::uint64_t x : a.residues()) rs.push_back(i64(x));
                rep.results["residues"] = std::move(rs);
                const GroupSet astar = a.empty() ? a : invert_set(a);
                if (k == ExtremalKind::eighth) {
                    rep.results["sumset_inverse_disjoint"] =
                        intersect(sumset(a, a), astar).empty();
                } else {
                    rep.results["self_inverse"] = astar == a;
                }
                if (k == ExtremalKind::ninth) rep.results["sum_free"] = is_sum_free(a);
                if (!set_out.empty()) write_text_file(set_out, set_to_json(a));
                return rep;
            };
        });
    }
    {
        CLI::App* c = app.add_subcommand("check-cd", "Cauchy-Davenport lower bound");
        c->add_option("--a", a_spec, "first set")->required();
        c->add_option("--b", b_spec, "second set")->required();
        add_common(c);
        c->callback([&] {
            body = [&] {
                return check_cauchy_davenport(load_set_spec(a_spec), load_set_spec(b_spec));
            };
        });
    }
    {
        CLI::App* c = app.add_subcommand("check-pollard", "Pollard partial-sumset bound");
        c->add_option("--a", a_spec, "first set")->required();
        c->add_option("--b", b_spec, "second set")->required();
        c->add_option("--eps", pollard_eps, "partial-sumset level")->required();
        add_common(c);
        c->callback([&] {
            body = [&] {
                return check_pollard_partial(load_set_spec(a_spec), load_set_spec(b_spec),
                                             pollard_eps);
            };
        });
    }
    {
        CLI::App* c = app.add_subcommand("verify-coverage", "does A(A+A) cover F_p^*?");
        c->add_option("--set", set_spec, "set spec")->required();
        add_common(c);
        c->callback([&] {
            body = [&] { return verify_coverage(load_set_spec(set_spec)); };
        });
    }
    {
        CLI::App* c = app.add_subcommand("verify-aainv", "|A + A*| against its reference");
        c->add_option("--set", set_spec, "set spec")->required();
        c->add_option("--eps", opt_eps, "also measure |A +_eps A*|");
        add_common(c);
        c->callback([&] {
            body = [&] {
                return verify_a_plus_ainv(load_set_spec(set_spec),
                                          opt_eps > 0 ? std::optional<double>(opt_eps)
                                                      : std::nullopt);
            };
        });
    }

    std::string replay_kind = "sumfree_selfinv";
    double replay_delta = 0.02;
    {
        CLI::App* c = app.add_subcommand("replay", "re-run a proof pipeline at a prime");
        c->add_option("--kind", replay_kind, "a_a_a | sumfree_selfinv | a_plus_ainv")
            ->check(CLI::IsMember({"a_a_a", "sumfree_selfinv", "a_plus_ainv"}))
            ->required();
        c->add_option("--set", set_spec, "set spec (default: the matching construction)");
        c->add_option("--p", prime, "prime for the default construction");
        c->add_option("--lambda", lambda, "lambda for the a_plus_ainv construction");
        c->add_option("--delta", replay_delta, "chain parameter delta (or eps)");
        c->add_option("--xi", xi, "wrapper exceptional fraction");
        c->add_option("--T", t_param, "exception-set strength (0: kind default)");
        c->add_option("--seed", seed, "RNG seed");
        add_common(c);
        c->callback([&] {
            body = [&] {
                const ReplayKind k = replay_kind == "a_a_a" ? ReplayKind::a_a_a
                                     : replay_kind == "a_plus_ainv"
                                         ? ReplayKind::a_plus_ainv
                                         : ReplayKind::sumfree_selfinv;
                GroupSet a = [&] {
                    if (!set_spec.empty()) return load_set_spec(set_spec);
                    require_arg(prime != 0, "replay: need --set or --p");
                    switch (k) {
                        case ReplayKind::a_a_a:
                            return construct_extremal(ExtremalKind::eighth, prime);
                        case ReplayKind::sumfree_selfinv:
                            return construct_extremal(ExtremalKind::ninth, prime);
                        default:
                            return construct_extremal(ExtremalKind::lambda, prime, lambda);
                    }
                }();
                ReplayParams pr;
                pr.delta = replay_delta;
                pr.xi = xi;
                pr.T = t_param;
                return replay_proof(k, a, pr, seed);
            };
        });
    }

    std::string problem = "sumfree", objective = "sumfree";
    std::uint64_t budget = 20000;
    {
        CLI::App* c = app.add_subcommand("exhaustive", "exact extremal optima (small p)");
        c->add_option("--p", prime, "prime modulus")->required();
        c->add_option("--problem", problem, "sumfree | coverage")
            ->check(CLI::IsMember({"sumfree", "coverage"}));
        add_common(c);
        c->callback([&] {
            body = [&] {
                return exhaustive_extremal(
                    prime, problem == "sumfree" ? ExhaustiveProblem::max_sumfree_selfinv
                                                : ExhaustiveProblem::min_alpha_coverage);
            };
        });
    }
    {
        CLI::App* c = app.add_subcommand("anneal", "simulated-annealing search");
        c->add_option("--p", prime, "prime modulus")->required();
        c->add_option("--objective", objective, "sumfree | noncover")
            ->check(CLI::IsMember({"sumfree", "noncover"}));
        c->add_option("--budget", budget, "number of proposed moves");
        c->add_option("--seed", seed, "RNG seed");
        add_common(c);
        c->callback([&] {
            body = [&] {
                return stochastic_search(
                    prime,
                    objective == "sumfree" ? SearchObjective::max_sumfree_selfinv
                                           : SearchObjective::max_noncover,
                    budget, seed);
            };
        });
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(std::move(reversed));
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    }

    try {
        const auto t0 = std::chrono::steady_clock::now();
        ExperimentReport rep = body();
        if (timing) {
            rep.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                 std::chrono::steady_clock::now() - t0)
                                 .count();
        }
        const ReportFormat fmt =
            format == "csv" ? ReportFormat::csv : ReportFormat::json;
        if (!out_path.empty()) {
            std::ofstream f(out_path);
            require_arg(f.good(), "cannot open output file " + out_path);
            emit_report(rep, fmt, f);
        } else {
            emit_report(rep, fmt, out);
        }
        return 0;
    } catch (const std::invalid_argument& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const theorem_violation& e) {
        err << "theorem violation: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace znwrap
