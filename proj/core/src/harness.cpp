#include "lclt/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lclt/charfn.hpp"
#include "lclt/decoupling.hpp"
#include "lclt/format.hpp"
#include "lclt/graph.hpp"
#include "lclt/inequalities.hpp"
#include "lclt/metrics.hpp"
#include "lclt/moments.hpp"
#include "lclt/monte_carlo.hpp"

namespace lclt {
namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr double kDefaultGamma = 0.05;
constexpr double kDefaultEpsilon = 0.1;

std::string num(double v) { return std::isnan(v) ? std::string() : format_double(v); }

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double parse_double(const std::string& key, const std::string& s) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    require(ec == std::errc{} && ptr == s.data() + s.size() && std::isfinite(v), ErrorKind::invalid_parameter,
            "manifest key '" + key + "': '" + s + "' is not a finite number");
    return v;
}

std::uint64_t parse_count(const std::string& key, const std::string& s) {
    std::uint64_t v = 0;
    const bool hex = s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X');
    const char* first = s.data() + (hex ? 2 : 0);
    const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v, hex ? 16 : 10);
    if (ec == std::errc{} && ptr == s.data() + s.size()) return v;
    const double d = parse_double(key, s);
    require(d >= 0.0 && d < 1.8e19 && d == std::floor(d), ErrorKind::invalid_parameter,
            "manifest key '" + key + "': '" + s + "' is not a nonnegative integer");
    return static_cast<std::uint64_t>(d);
}

template <class T, class Parse>
std::vector<T> parse_list(const std::string& key, const std::string& value, Parse parse) {
    std::vector<T> out;
    for (const auto& item : split_list(value)) out.push_back(static_cast<T>(parse(key, item)));
    return out;
}

template <class T>
std::string join(const std::vector<T>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ", ";
        if constexpr (std::is_floating_point_v<T>)
            out += num(values[i]);
        else
            out += std::to_string(values[i]);
    }
    return out;
}

std::string manifest_text(const Manifest& mf, bool runtime_keys) {
    std::ostringstream os;
    os << "kind = " << to_string(mf.kind) << '\n';
    auto list = [&](const char* key, const auto& values) {
        if (!values.empty()) os << key << " = " << join(values) << '\n';
    };
    auto opt = [&](const char* key, const std::optional<double>& v) {
        if (v) os << key << " = " << num(*v) << '\n';
    };
    list("n", mf.n);
    list("p", mf.p);
    opt("p_scale", mf.p_scale);
    opt("p_exponent", mf.p_exponent);
    opt("p_cap", mf.p_cap);
    list("m", mf.m);
    list("t", mf.t);
    list("gamma", mf.gamma);
    list("K", mf.K);
    list("epsilon", mf.epsilon);
    os << "seed = " << mf.seed << '\n';
    os << "samples = " << mf.samples << '\n';
    os << "trials = " << mf.trials << '\n';
    os << "points_per_segment = " << mf.points_per_segment << '\n';
    os << "exact_ceiling = " << mf.exact_ceiling << '\n';
    os << "c_edge = " << num(mf.c_edge) << '\n';
    if (runtime_keys) {
        os << "workers = " << mf.workers << '\n';
        os << "out = " << mf.out << '\n';
        if (!mf.cache_dir.empty()) os << "cache_dir = " << mf.cache_dir << '\n';
    }
    return os.str();
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::vector<double> gammas(const Manifest& mf) {
    return mf.gamma.empty() ? std::vector<double>{kDefaultGamma} : mf.gamma;
}

std::vector<double> epsilons(const Manifest& mf) {
    return mf.epsilon.empty() ? std::vector<double>{kDefaultEpsilon} : mf.epsilon;
}

fs::path cache_dir_of(const Manifest& mf) {
    return mf.cache_dir.empty() ? fs::path(mf.out) / "cache" : fs::path(mf.cache_dir);
}

struct Outputs {
    std::string csv;
    json summary;
    std::map<std::string, std::string> extra;
};

Pmf routed_pmf(const Manifest& mf, std::size_t n, double p) {
    if (n <= mf.exact_ceiling)
        return pmf_from_table(cached_table(n, cache_dir_of(mf), mf.exact_ceiling, mf.workers).table, p);
    return mc_pmf(n, p, mf.samples, mf.seed, mf.workers);
}

Outputs run_pmf(const Manifest& mf) {
    Outputs o;
    std::ostringstream csv;
    csv << "n,p,k,prob,ci,source\n";
    json cells = json::array();
    std::string common;
    for (const std::size_t n : mf.n)
        for (const double p : p_values(mf, n)) {
            const Pmf pmf = routed_pmf(mf, n, p);
            const std::string source = to_string(pmf.source);
            for (std::size_t i = 0; i < pmf.probs.size(); ++i)
                csv << n << ',' << num(p) << ',' << pmf.k_lo + static_cast<std::int64_t>(i) << ','
                    << num(pmf.probs[i]) << ',' << num(pmf.ci.empty() ? 0.0 : pmf.ci[i]) << ',' << source << '\n';
            const Moments m = moments(n, p);
            cells.push_back({{"n", n}, {"p", p}, {"source", source}, {"samples", pmf.samples},
                             {"total_mass", pmf.total()}, {"mu", m.mu}, {"sigma", m.sigma}});
            common = common.empty() || common == source ? source : "mixed";
        }
    o.csv = csv.str();
    o.summary = {{"kind", "pmf"}, {"source", common}, {"cells", cells}};
    return o;
}

Outputs run_charfn(const Manifest& mf) {
    require(mf.n.size() == 1, ErrorKind::invalid_parameter, "charfn runs take exactly one n");
    const std::size_t n = mf.n.front();
    const auto ps = p_values(mf, n);
    const auto gs = gammas(mf);
    require(ps.size() == 1 && gs.size() == 1 && mf.K.size() <= 1, ErrorKind::invalid_parameter,
            "charfn runs take exactly one p, one gamma and at most one K");
    const double p = ps.front();
    const double gamma = gs.front();
    const double K = mf.K.empty() ? default_stein_cutoff(n, p, gamma) : mf.K.front();
    const RegimeBounds bounds = regime_bounds(n, p, gamma, K);
    const std::vector<double> grid = mf.t.empty() ? regime_grid(bounds, mf.points_per_segment) : mf.t;

    const CharFnSeries series = estimate_charfn(n, p, grid, mf.samples, mf.seed, mf.workers);
    const RegimeCheck check = check_regime_bounds(series, gamma, K, mf.c_edge);
    std::ostringstream csv;
    write_charfn_csv(csv, series, check);

    Outputs o;
    o.csv = csv.str();
    const Moments m = moments(n, p);
    double reach = 0.0;
    for (const double t : grid) reach = std::max(reach, std::abs(t));
    json stein = nullptr;
    if (reach >= K) {
        const SteinDiscrepancy sd = stein_discrepancy(n, p, K, series);
        stein = {{"discrepancy", sd.discrepancy}, {"predictor", sd.predictor}, {"ratio", sd.ratio},
                 {"points", sd.points}};
    }
    o.summary = {{"kind", "charfn"},
                 {"n", n},
                 {"p", p},
                 {"gamma", gamma},
                 {"delta", 2.0 - 1.0 / (0.5 + gamma)},
                 {"K", K},
                 {"c_edge", mf.c_edge},
                 {"mu", m.mu},
                 {"sigma", m.sigma},
                 {"samples", series.samples_used},
                 {"boundaries",
                  {{"stein_K", K},
                   {"mid_lo", bounds.mid_lo},
                   {"mid_hi", bounds.mid_hi},
                   {"edge_lo", bounds.edge_lo},
                   {"edge_hi", bounds.edge_hi}}},
                 {"mid_valid", bounds.mid_valid},
                 {"edge_valid", bounds.edge_valid},
                 {"mid_empty", bounds.mid_empty()},
                 {"mid_points", check.mid_points},
                 {"mid_violations", check.mid_violations},
                 {"edge_rate_sqrt_n", check.edge_rate_sqrt_n},
                 {"edge_rate_pn", check.edge_rate_pn},
                 {"stein", stein}};
    return o;
}

Outputs run_decoupling(const Manifest& mf) {
    require(!mf.m.empty(), ErrorKind::invalid_parameter, "decoupling runs need m");
    std::ostringstream csv;
    csv << "trial,m,|A|,|A'|,ratio,pass\n";
    std::ostringstream checks_csv;
    checks_csv << "n,m,p,t,lhs,lhs_ci,rhs,rhs_ci,margin,combined_ci,method\n";
    json cells = json::array();
    json checks = json::array();

    for (const std::size_t n : mf.n)
        for (const std::size_t m : mf.m)
            for (const double p : p_values(mf, n)) {
                if (mf.trials > 0 && m == 1) {
                    const SingleVertexReport r = single_vertex_trial(n, p, mf.trials, mf.seed, mf.workers);
                    for (const auto& row : r.rows)
                        csv << row.trial << ",1," << r.a_size << ',' << row.a_prime << ','
                            << num(static_cast<double>(row.a_prime) / static_cast<double>(r.a_size)) << ','
                            << (static_cast<double>(row.a_prime) >= r.threshold) << '\n';
                    cells.push_back({{"n", n}, {"m", 1}, {"p", p}, {"trials", r.trials}, {"a_size", r.a_size},
                                     {"threshold", r.threshold}, {"frequency", r.frequency},
                                     {"probability_bound", r.probability_bound},
                                     {"pass", r.frequency >= r.probability_bound - 0.02},
                                     {"sym_diff_mean", r.sym_diff_mean}, {"sym_diff_expected", r.sym_diff_expected},
                                     {"sym_diff_stderr", r.sym_diff_stderr}, {"sym_diff_tv", r.sym_diff_tv}});
                } else if (mf.trials > 0) {
                    const TypicalAlphaReport r = typical_alpha_trial(n, m, p, mf.trials, mf.seed, mf.workers);
                    for (const auto& row : r.rows)
                        csv << row.trial << ',' << m << ',' << r.a_size << ',' << row.a_prime_proof << ','
                            << num(static_cast<double>(row.a_prime_proof) / static_cast<double>(r.a_size)) << ','
                            << (static_cast<double>(row.a_prime_proof) >= r.threshold) << '\n';
                    cells.push_back({{"n", n}, {"m", m}, {"p", p}, {"trials", r.trials}, {"a_size", r.a_size},
                                     {"threshold", r.threshold}, {"frequency_proof_window", r.freq_proof},
                                     {"frequency_lemma_window", r.freq_lemma},
                                     {"expected_alpha_sq", r.expected_alpha_sq}, {"mean_alpha_sq", r.mean_alpha_sq}});
                }
                if (mf.t.empty()) continue;
                const EndowedPartition part = make_partition(n, m, mf.seed);
                std::vector<DecouplingCheck> results;
                std::string method;
                if (n <= 6 && 2 * part.b_size() <= 24) {
                    method = "exact";
                    const auto table = cached_table(n, cache_dir_of(mf), mf.exact_ceiling, mf.workers).table;
                    results = exact_decoupling(table, part, p, mf.t);
                } else {
                    method = "monte-carlo";
                    for (const double t : mf.t)
                        results.push_back(verify_decoupling(n, m, p, t, mf.samples, mf.seed, mf.workers));
                }
                for (const auto& c : results) {
                    checks_csv << n << ',' << m << ',' << num(p) << ',' << num(c.t) << ',' << num(c.lhs) << ','
                               << num(c.lhs_ci) << ',' << num(c.rhs) << ',' << num(c.rhs_ci) << ',' << num(c.margin)
                               << ',' << num(c.combined_ci) << ',' << method << '\n';
                    checks.push_back({{"n", n}, {"m", m}, {"p", p}, {"t", c.t}, {"lhs", c.lhs}, {"rhs", c.rhs},
                                      {"margin", c.margin}, {"combined_ci", c.combined_ci}, {"method", method}});
                }
            }
    Outputs o;
    o.csv = csv.str();
    o.summary = {{"kind", "decoupling"}, {"cells", cells}, {"checks", checks}};
    if (!mf.t.empty()) o.extra["checks.csv"] = checks_csv.str();
    return o;
}

Outputs run_distances(const Manifest& mf) {
    std::ostringstream csv;
    csv << "n,p,epsilon,sup_lattice,sup_lattice_ci,l1,l1_outside,anticoncentration,predicted_bound,source,samples\n";
    json reports = json::array();
    Outputs o;
    for (const std::size_t n : mf.n)
        for (const double p : p_values(mf, n)) {
            const Pmf pmf = routed_pmf(mf, n, p);
            const Moments m = moments(n, p);
            const double sup_ci = sup_lattice_ci(pmf, m);
            const L1Distance l1 = l1_distance(pmf, m);
            for (const double eps : epsilons(mf)) {
                const DistanceReport r = distance_report(pmf, eps);
                csv << n << ',' << num(p) << ',' << num(eps) << ',' << num(r.sup_lattice) << ',' << num(sup_ci) << ','
                    << num(r.l1) << ',' << num(l1.outside_mass) << ',' << num(r.anticoncentration) << ','
                    << num(r.predicted_bound) << ',' << r.source << ',' << r.samples << '\n';
                o.extra["distance_n" + std::to_string(n) + "_p" + num(p) + "_eps" + num(eps) + ".json"] =
                    to_json(r) + "\n";
                reports.push_back({{"n", n}, {"p", p}, {"epsilon", eps}, {"sup_lattice", r.sup_lattice},
                                   {"sup_lattice_ci", sup_ci}, {"l1", r.l1}, {"l1_outside", l1.outside_mass},
                                   {"anticoncentration", r.anticoncentration},
                                   {"normal_mode", 1.0 / std::sqrt(2.0 * std::numbers::pi)},
                                   {"predicted_bound", r.predicted_bound}, {"source", r.source},
                                   {"samples", r.samples}, {"clipped", pmf.clipped}});
            }
        }
    o.csv = csv.str();
    o.summary = {{"kind", "distances"}, {"reports", reports}};
    return o;
}

Outputs run_verify(const Manifest& mf) {
    std::ostringstream csv;
    csv << "check,parameter,value,bound,holds\n";
    std::size_t failures = 0;
    auto row = [&](const std::string& check, const std::string& parameter, double value, double bound, bool holds) {
        csv << check << ',' << parameter << ',' << num(value) << ',' << num(bound) << ',' << holds << '\n';
        failures += !holds;
    };

    const Domination grid = verify_charfn_bound_grid(100, 100, 1e-12);
    row("charfn_bound_grid", "points=" + std::to_string(grid.points), grid.worst_excess, 1e-12, grid.violations == 0);
    const Domination tails = verify_chernoff(30, 1e-15);
    row("chernoff_tail", "trials<=30;points=" + std::to_string(tails.points), tails.worst_excess, 1e-15,
        tails.violations == 0);

    const std::vector<std::size_t> ns = mf.n.empty() ? std::vector<std::size_t>{3, 4, 5, 6} : mf.n;
    json profiles = json::array();
    for (const std::size_t n : ns)
        for (int tenth = 1; tenth <= 9; ++tenth) {
            const double p = tenth / 10.0;
            const DerivativeProfile d = triangle_derivative_profile(n, p);
            profiles.push_back({{"n", n}, {"p", p}, {"e", {d.e[0], d.e[1], d.e[2], d.e[3]}},
                                {"e0e1_over_sigma2", d.e[0] * d.e[1] / moments(n, p).sigma2}});
        }

    const std::vector<double> constant(64, 3.0);
    const std::vector<double> two_point = {0.0, 1.0};
    for (const auto& [name, values] :
         {std::pair{std::string("constant"), constant}, std::pair{std::string("two_point"), two_point}}) {
        const PaleyZygmund pz = paley_zygmund_check(values, 0.5);
        row("paley_zygmund", name + ";theta=0.5", pz.lhs, pz.rhs, pz.holds);
    }
    const TypicalAlphaReport alpha = typical_alpha_trial(400, 100, 0.2, 1, mf.seed, mf.workers);
    const PaleyZygmund pz = paley_zygmund_check(alpha.alpha_sq_sample, 0.5);
    row("paley_zygmund", "alpha_sq;n=400;m=100;p=0.2;theta=0.5", pz.lhs, pz.rhs, pz.holds);

    const std::vector<double> ks = mf.K.empty() ? std::vector<double>{2.0, 3.0, 4.0} : mf.K;
    for (const double K : ks) {
        const double integral = std::sqrt(std::numbers::pi / 2.0) * std::erfc(K / std::numbers::sqrt2);
        row("gaussian_tail_integral", "K=" + num(K), integral, gaussian_tail(K), integral <= gaussian_tail(K));
        row("gaussian_tail_exp", "K=" + num(K), gaussian_tail(K), std::exp(-K), gaussian_tail(K) <= std::exp(-K));
    }

    const std::size_t kv_n = 50;
    const double kv_p = 0.3;
    const double r = 2.0 * std::log(static_cast<double>(kv_n)) + 3.0;
    const KimVuBound kv = kimvu_bound(kv_n, kv_p, r);
    const Moments kv_m = moments(kv_n, kv_p);
    struct Acc {
        std::uint64_t hits = 0;
    };
    const auto accs = sample_triangle_counts<Acc>(SamplingPlan{kv_n, kv_p, mf.seed, mf.samples, 30, mf.workers, 0},
                                                  [] { return Acc{}; }, [&](Acc& acc, std::uint64_t k) {
                                                      acc.hits += std::abs(static_cast<double>(k) - kv_m.mu) >=
                                                                  kv.threshold;
                                                  });
    std::uint64_t hits = 0;
    for (const auto& a : accs) hits += a.hits;
    const double freq = static_cast<double>(hits) / static_cast<double>(mf.samples);
    const double se = std::sqrt(std::max(freq * (1.0 - freq), 0.0) / static_cast<double>(mf.samples));
    row("kimvu_empirical", "n=50;p=0.3;r=" + num(r), freq, kv.tail + 3.0 * se, freq <= kv.tail + 3.0 * se);

    Outputs o;
    o.csv = csv.str();
    o.summary = {{"kind", "toolbox-verify"},
                 {"failures", failures},
                 {"charfn_bound_grid", {{"points", grid.points}, {"violations", grid.violations}}},
                 {"chernoff", {{"points", tails.points}, {"violations", tails.violations}}},
                 {"kimvu", {{"threshold", kv.threshold}, {"tail", kv.tail}, {"c3", 1.0}, {"samples", mf.samples}}},
                 {"derivative_profiles", profiles}};
    return o;
}

Outputs run_cover(const Manifest& mf) {
    std::ostringstream csv;
    csv << "n,p,gamma,t,witness_m,covered\n";
    json cells = json::array();
    for (const std::size_t n : mf.n)
        for (const double p : p_values(mf, n))
            for (const double gamma : gammas(mf)) {
                const CoverReport r = interval_cover_check(n, p, gamma, mf.points_per_segment);
                for (const auto& w : r.witnesses)
                    csv << n << ',' << num(p) << ',' << num(gamma) << ',' << num(w.t) << ','
                        << (w.m ? std::to_string(*w.m) : std::string()) << ',' << w.m.has_value() << '\n';
                cells.push_back({{"n", n},
                                 {"p", p},
                                 {"gamma", gamma},
                                 {"delta", r.delta},
                                 {"sigma", r.sigma},
                                 {"m_first", r.m_first},
                                 {"m_last", r.m_last},
                                 {"overlap_failures", r.overlap_failures},
                                 {"first_failure", r.first_failure ? json(*r.first_failure) : json(nullptr)},
                                 {"overlaps_hold", r.overlaps_hold},
                                 {"endpoints_monotone", r.endpoints_monotone},
                                 {"target_lo", r.target_lo},
                                 {"target_hi", r.target_hi},
                                 {"target_empty", r.target_empty},
                                 {"target_covered", r.target_covered},
                                 {"last_right_endpoint", r.last_right_endpoint},
                                 {"last_right_below_target", r.last_right_below_target},
                                 {"first_left_endpoint", r.first_left_endpoint},
                                 {"first_left_above_target", r.first_left_above_target}});
            }
    return {csv.str(), {{"kind", "cover-check"}, {"cells", cells}}, {}};
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
    out.close();
    require(static_cast<bool>(out), ErrorKind::resource_limit, "cannot write " + path.string());
}

} // namespace

std::string to_string(ExperimentKind kind) {
    switch (kind) {
    case ExperimentKind::pmf: return "pmf";
    case ExperimentKind::charfn: return "charfn";
    case ExperimentKind::decoupling: return "decoupling";
    case ExperimentKind::distances: return "distances";
    case ExperimentKind::toolbox_verify: return "toolbox-verify";
    case ExperimentKind::cover_check: return "cover-check";
    }
    return "unknown";
}

ExperimentKind parse_kind(const std::string& name) {
    if (name == "pmf") return ExperimentKind::pmf;
    if (name == "charfn") return ExperimentKind::charfn;
    if (name == "decoupling" || name == "decouple") return ExperimentKind::decoupling;
    if (name == "distances") return ExperimentKind::distances;
    if (name == "toolbox-verify" || name == "verify") return ExperimentKind::toolbox_verify;
    if (name == "cover-check" || name == "cover") return ExperimentKind::cover_check;
    fail(ErrorKind::invalid_parameter, "unknown experiment kind '" + name + "'");
}

void set_manifest_value(Manifest& mf, const std::string& key, const std::string& value) {
    auto count = [](const std::string& k, const std::string& s) { return parse_count(k, s); };
    auto real = [](const std::string& k, const std::string& s) { return parse_double(k, s); };
    if (key == "kind") mf.kind = parse_kind(value);
    else if (key == "n") mf.n = parse_list<std::size_t>(key, value, count);
    else if (key == "p") mf.p = parse_list<double>(key, value, real);
    else if (key == "m") mf.m = parse_list<std::size_t>(key, value, count);
    else if (key == "t") mf.t = parse_list<double>(key, value, real);
    else if (key == "gamma") mf.gamma = parse_list<double>(key, value, real);
    else if (key == "K") mf.K = parse_list<double>(key, value, real);
    else if (key == "epsilon") mf.epsilon = parse_list<double>(key, value, real);
    else if (key == "seed") mf.seed = parse_count(key, value);
    else if (key == "samples") mf.samples = parse_count(key, value);
    else if (key == "trials") mf.trials = parse_count(key, value);
    else if (key == "workers") mf.workers = parse_count(key, value);
    else if (key == "points_per_segment") mf.points_per_segment = parse_count(key, value);
    else if (key == "exact_ceiling") mf.exact_ceiling = parse_count(key, value);
    else if (key == "c_edge") mf.c_edge = parse_double(key, value);
    else if (key == "p_scale") mf.p_scale = parse_double(key, value);
    else if (key == "p_exponent") mf.p_exponent = parse_double(key, value);
    else if (key == "p_cap") mf.p_cap = parse_double(key, value);
    else if (key == "out") mf.out = value;
    else if (key == "cache_dir") mf.cache_dir = value;
    else fail(ErrorKind::invalid_parameter, "unknown manifest key '" + key + "'");
}

Manifest parse_manifest(std::istream& in) {
    Manifest mf;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        require(eq != std::string::npos, ErrorKind::invalid_parameter,
                "manifest line " + std::to_string(line_no) + " has no '='");
        set_manifest_value(mf, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return mf;
}

Manifest parse_manifest_text(const std::string& text) {
    std::istringstream in(text);
    return parse_manifest(in);
}

std::string to_text(const Manifest& manifest) { return manifest_text(manifest, true); }

std::string output_key(const Manifest& manifest) {
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx",
                  static_cast<unsigned long long>(fnv1a(manifest_text(manifest, false))));
    std::string kind = to_string(manifest.kind);
    std::replace(kind.begin(), kind.end(), '-', '_');
    return kind + "_" + hex;
}

std::vector<double> p_values(const Manifest& mf, std::size_t n) {
    if (!mf.p.empty()) return mf.p;
    require(mf.p_scale && mf.p_exponent, ErrorKind::invalid_parameter,
            "manifest needs p or a p path (p_scale, p_exponent)");
    const double cap = mf.p_cap.value_or(1.0);
    return {std::min(cap, *mf.p_scale * std::pow(static_cast<double>(n), *mf.p_exponent))};
}

void validate(const Manifest& mf) {
    const bool samples_graphs = mf.kind != ExperimentKind::cover_check;
    if (mf.kind != ExperimentKind::toolbox_verify)
        require(!mf.n.empty(), ErrorKind::invalid_parameter, "manifest needs n");
    for (const std::size_t n : mf.n) {
        require(n >= 3, ErrorKind::invalid_parameter, "n = " + std::to_string(n) + " is below 3");
        if (samples_graphs)
            require(n <= kMaxVertices, ErrorKind::invalid_parameter, "n = " + std::to_string(n) + " exceeds 2^16");
        for (const double p : p_values(mf, n))
            require(p > 0.0 && p < 1.0, ErrorKind::invalid_parameter, "p = " + num(p) + " outside (0, 1)");
    }
    for (const double g : mf.gamma)
        require(g > 0.0 && g < 0.125, ErrorKind::invalid_parameter, "gamma = " + num(g) + " outside (0, 1/8)");
    for (const double e : mf.epsilon)
        require(e > 0.0 && e < 1.0, ErrorKind::invalid_parameter, "epsilon = " + num(e) + " outside (0, 1)");
    for (const double K : mf.K) require(K > 0.0, ErrorKind::invalid_parameter, "K must be positive");
    for (const double t : mf.t) require(std::isfinite(t), ErrorKind::invalid_parameter, "t must be finite");
    for (const std::size_t m : mf.m) require(m >= 1, ErrorKind::invalid_parameter, "m must be at least 1");
    require(mf.samples >= 1, ErrorKind::invalid_parameter, "samples must be positive");
    require(mf.points_per_segment >= 1, ErrorKind::invalid_parameter, "points_per_segment must be positive");
    require(!mf.out.empty(), ErrorKind::invalid_parameter, "out must not be empty");
}

int exit_code(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::invalid_parameter:
    case ErrorKind::resource_limit: return 2;
    case ErrorKind::domain:
    case ErrorKind::coverage:
    case ErrorKind::degenerate: return 3;
    case ErrorKind::numeric:
    case ErrorKind::checksum: return 4;
    }
    return 1;
}

RunResult run(const Manifest& manifest) {
    RunResult result;
    fs::path staging;
    try {
        validate(manifest);
        Outputs outputs;
        switch (manifest.kind) {
        case ExperimentKind::pmf: outputs = run_pmf(manifest); break;
        case ExperimentKind::charfn: outputs = run_charfn(manifest); break;
        case ExperimentKind::decoupling: outputs = run_decoupling(manifest); break;
        case ExperimentKind::distances: outputs = run_distances(manifest); break;
        case ExperimentKind::toolbox_verify: outputs = run_verify(manifest); break;
        case ExperimentKind::cover_check: outputs = run_cover(manifest); break;
        }
        const std::string key = output_key(manifest);
        const fs::path dir = fs::path(manifest.out) / key;
        staging = fs::path(manifest.out) / (key + ".partial");
        fs::remove_all(staging);
        fs::create_directories(staging);
        write_file(staging / "results.csv", outputs.csv);
        write_file(staging / "summary.json", outputs.summary.dump(2) + "\n");
        write_file(staging / "manifest.echo", to_text(manifest));
        for (const auto& [name, content] : outputs.extra) write_file(staging / name, content);
        fs::remove_all(dir);
        fs::rename(staging, dir);
        result.directory = dir;
        result.message = "wrote " + dir.string();
    } catch (const Error& e) {
        result.exit_code = exit_code(e.kind());
        result.message = e.what();
    } catch (const std::exception& e) {
        result.exit_code = 1;
        result.message = e.what();
    }
    if (result.exit_code != 0 && !staging.empty()) {
        std::error_code ignored;
        fs::remove_all(staging, ignored);
    }
    return result;
}

fs::path cache_path(const fs::path& dir, std::size_t n) {
    return dir / ("triangle_table_n" + std::to_string(n) + ".csv");
}

void cache(const TriangleEdgeTable& table, const fs::path& dir) {
    fs::create_directories(dir);
    const fs::path target = cache_path(dir, table.n());
    const fs::path tmp = target.string() + ".tmp";
    std::ostringstream os;
    write_table(os, table);
    write_file(tmp, os.str());
    fs::rename(tmp, target);
}

TriangleEdgeTable load_cache(std::size_t n, const fs::path& dir) {
    const fs::path path = cache_path(dir, n);
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), ErrorKind::resource_limit, "no cached census at " + path.string());
    TriangleEdgeTable table = read_table(in);
    require(table.n() == n, ErrorKind::checksum, "cached census at " + path.string() + " is for another n");
    return table;
}

CachedTable cached_table(std::size_t n, const fs::path& dir, std::size_t ceiling, std::size_t workers) {
    if (fs::exists(cache_path(dir, n))) {
        try {
            return {load_cache(n, dir), false};
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::checksum) throw;
        }
    }
    CachedTable out{build_table(n, ceiling, workers), true};
    cache(out.table, dir);
    return out;
}

} // namespace lclt
