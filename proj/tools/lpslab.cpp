// Experiment runner: lpslab <subcommand> [--config FILE] [flags].
#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "lpslab/acceptance.hpp"
#include "lpslab/carleson.hpp"
#include "lpslab/csv.hpp"
#include "lpslab/hardy.hpp"
#include "lpslab/kernels.hpp"
#include "lpslab/lpso.hpp"
#include "lpslab/moments.hpp"
#include "lpslab/parallel.hpp"
#include "lpslab/paraproduct.hpp"

using namespace lpslab;
namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kSubcommands{"mothers", "certify", "cascade", "carleson", "bony", "hardy", "verify"};

struct ExperimentConfig {
    int dim = 1;
    int grid_log2 = 12;
    int k_min = 0;
    int k_max = 8;
    int L = 1;
    double delta = 1.0;
    std::vector<double> p_list{0.8};
    std::vector<int> atom_levels{3, 4, 5, 6, 7, 8};
    std::vector<unsigned long long> seeds{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    std::string beta_kind = "half";
    std::string family = "corrected";  // hardy only: corrected | phi
    std::string output_dir = "out";
};

// Raw string values by config key; later sources override earlier ones.
using RawConfig = std::map<std::string, std::string>;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');)
        if (!trim(item).empty()) out.push_back(trim(item));
    return out;
}

void read_config_file(const std::string& path, RawConfig& raw, std::vector<std::string>& errors) {
    std::ifstream in(path);
    if (!in) {
        errors.push_back("cannot read config file '" + path + "'");
        return;
    }
    int line_no = 0;
    for (std::string line; std::getline(in, line);) {
        ++line_no;
        line = trim(line.substr(0, line.find('#')));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            errors.push_back(path + ":" + std::to_string(line_no) + ": expected 'key = value'");
            continue;
        }
        raw[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
}

template <class T>
bool parse_scalar(const std::string& s, T& out) {
    std::istringstream is(s);
    is.imbue(std::locale::classic());
    T v{};
    is >> v;
    if (!is || !is.eof()) return false;
    out = v;
    return true;
}

ExperimentConfig build_config(const RawConfig& raw, std::vector<std::string>& errors) {
    ExperimentConfig c;
    auto scalar = [&](const char* key, auto& field) {
        if (auto it = raw.find(key); it != raw.end() && !parse_scalar(it->second, field))
            errors.push_back(std::string(key) + ": cannot parse '" + it->second + "'");
    };
    auto list = [&](const char* key, auto& field) {
        auto it = raw.find(key);
        if (it == raw.end()) return;
        field.clear();
        for (const std::string& item : split_list(it->second)) {
            typename std::decay_t<decltype(field)>::value_type v{};
            if (parse_scalar(item, v)) field.push_back(v);
            else errors.push_back(std::string(key) + ": cannot parse list item '" + item + "'");
        }
    };
    const std::vector<std::string> known{"dim",   "grid_log2",  "k_min",     "k_max",  "L",         "delta",
                                         "p_list", "atom_levels", "seeds", "beta_kind", "family", "output_dir"};
    for (const auto& [k, v] : raw)
        if (std::find(known.begin(), known.end(), k) == known.end()) errors.push_back("unknown config key '" + k + "'");
    scalar("dim", c.dim);
    scalar("grid_log2", c.grid_log2);
    scalar("k_min", c.k_min);
    scalar("k_max", c.k_max);
    scalar("L", c.L);
    scalar("delta", c.delta);
    list("p_list", c.p_list);
    list("atom_levels", c.atom_levels);
    list("seeds", c.seeds);
    if (auto it = raw.find("beta_kind"); it != raw.end()) c.beta_kind = it->second;
    if (auto it = raw.find("family"); it != raw.end()) c.family = it->second;
    if (auto it = raw.find("output_dir"); it != raw.end()) c.output_dir = it->second;
    return c;
}

AcceptanceConfig acceptance_config(const ExperimentConfig& c) {
    AcceptanceConfig a;
    a.dim = c.dim;
    a.grid_log2 = c.grid_log2;
    a.k_min = c.k_min;
    a.k_max = c.k_max;
    a.L = c.L;
    a.delta = c.delta;
    a.p = c.p_list.empty() ? 0.0 : c.p_list.front();
    return a;
}

/// Every precondition of the subcommand, checked before any computation.
std::vector<std::string> validate(const std::string& sub, const ExperimentConfig& c) {
    std::vector<std::string> e;
    if (sub == "verify") {
        e = lpslab::validate(acceptance_config(c));
        if (c.p_list.size() != 1) e.push_back("verify takes exactly one p");
    } else {
        if (c.dim != 1 && c.dim != 2) e.push_back("dim must be 1 or 2");
        if (c.grid_log2 < 6 || c.grid_log2 > (c.dim == 1 ? 16 : 9))
            e.push_back("grid_log2 must lie in [6, " + std::to_string(c.dim == 1 ? 16 : 9) + "] for dim " +
                        std::to_string(c.dim));
        if (c.k_min < 0 || c.k_min > c.k_max) e.push_back("need 0 <= k_min <= k_max");
        if (c.k_max > c.grid_log2 - 4) e.push_back("k_max must be <= grid_log2 - 4 (kernel resolution)");
        if (c.L < 0 || c.L > 2) e.push_back("L must lie in [0, 2]");
        if (!(c.delta > 0.0 && c.delta <= 1.0)) e.push_back("delta must lie in (0, 1]");
    }
    if ((sub == "cascade" || sub == "bony" || (sub == "hardy" && c.family == "corrected")) &&
        c.k_max - std::max(1, c.k_min) < 1)
        e.push_back("the paraproduct needs at least two scales k >= 1");
    {
        try {
            parse_beta_kind(c.beta_kind);
        } catch (const std::exception&) {
            e.push_back("beta_kind must be one of half, dyadic_step, sawtooth, lacunary (got '" + c.beta_kind + "')");
        }
    }
    if (sub == "hardy") {
        if (c.family != "corrected" && c.family != "phi") e.push_back("family must be corrected or phi");
        if (c.p_list.empty()) e.push_back("p_list is empty");
        for (double p : c.p_list) {
            if (!(p > 0.0 && p <= 1.0)) e.push_back("p = " + fmt(p) + " must lie in (0, 1]");
            else if (required_moments(p, c.dim) > 3)
                e.push_back("p = " + fmt(p) + " needs more than 3 vanishing moments in the H^p reference bank");
            else if (c.family == "corrected" && !(p > c.dim / (c.dim + c.L + c.delta)))
                e.push_back("p = " + fmt(p) + " must exceed n/(n+L+delta) for the corrected family");
        }
        if (c.atom_levels.empty()) e.push_back("atom_levels is empty");
        for (int l : c.atom_levels)
            if (l < 0 || l + 4 > c.grid_log2)
                e.push_back("atom level " + std::to_string(l) + " must lie in [0, grid_log2 - 4]");
        if (c.seeds.empty()) e.push_back("seeds is empty");
    }
    if (c.output_dir.empty()) e.push_back("output_dir is empty");
    else {
        // The directory is created at write time; here only its nearest existing ancestor is probed.
        fs::path d = fs::absolute(c.output_dir);
        while (!fs::exists(d) && d.has_parent_path() && d != d.parent_path()) d = d.parent_path();
        if (!fs::is_directory(d) || ::access(d.c_str(), W_OK | X_OK) != 0)
            e.push_back("output_dir '" + c.output_dir + "' is not writable");
    }
    return e;
}

/** Banks shared by the subcommands, built from the config. */
struct Setup {
    explicit Setup(const ExperimentConfig& c) : cfg(c), grid(c.dim, c.grid_log2), scales(c.k_min, c.k_max) {}

    std::shared_ptr<const MotherPair> mothers(int M) const {
        return std::make_shared<const MotherPair>(build_mothers(M, 0.25, grid));
    }
    std::shared_ptr<const BonyParaproduct> bony(const GridFunction& beta) const {
        const ScaleRange s(std::max(1, cfg.k_min), cfg.k_max);
        auto q = std::make_shared<const ConvolutionBank>(make_bank(mothers(cfg.L + 1), s));
        BankOptions o;
        o.phi_fix = std::max(cfg.L, 1);
        auto p = std::make_shared<const ConvolutionBank>(make_bank(mothers(0), s, o));
        return std::make_shared<const BonyParaproduct>(beta, q, p, cfg.L);
    }
    CascadeResult cascade(const std::shared_ptr<const BonyParaproduct>& pp) const {
        return correction_cascade(bony_family(pp), cfg.L, pp->p_bank());
    }

    const ExperimentConfig cfg;
    const Grid grid;
    const ScaleRange scales;
};

using Outputs = std::vector<std::pair<std::string, std::string>>;  // (part suffix, CSV text); "" is the main file

Outputs run_mothers(const Setup& s) {
    const int M = s.cfg.L + 1;
    const auto mp = s.mothers(M);
    CsvWriter psi({"alpha", "discrete_moment"});
    for (const MultiIndex& a : multi_indices_up_to(s.grid.dim(), M + 1)) psi.row({a.to_string(), fmt(kernel_moment(mp->psi, a))});
    return {{"", moment_matrix(*mp, s.cfg.L).csv()},
            {"psi_moments", psi.text()},
            {"phi_samples", mother_csv(mp->phi)},
            {"psi_samples", mother_csv(mp->psi)}};
}

Outputs run_certify(const Setup& s) {
    auto bank = std::make_shared<const KernelBank>(make_bank(s.mothers(s.cfg.L + 1), s.scales).psi);
    const double N = s.grid.dim() + 2.0 * s.cfg.L + 2.0 * s.cfg.delta;
    const CertificateRefinement r = certify_with_refinement(LpsoFamily::convolution(bank), N, s.cfg.L, s.cfg.delta, 20000);
    CsvWriter sum({"quantity", "value"});
    sum.row({"N", fmt(N)});
    sum.row({"stable", r.stable ? "1" : "0"});
    sum.row({"failed", r.failed ? "1" : "0"});
    return {{"", r.fine.csv()}, {"coarse", r.coarse.csv()}, {"summary", sum.text()}};
}

Outputs run_cascade(const Setup& s) {
    const auto pp = s.bony(make_beta(BetaKind::Half, s.grid));
    const CascadeResult cas = s.cascade(pp);
    CsvWriter w({"stage", "k", "alpha", "sup_abs"});
    for (const auto& [key, v] : cas.base.entries()) w.row({"base", fmt(static_cast<long long>(key.first)), key.second.to_string(), fmt(v.max_abs())});
    for (std::size_t m = 0; m < cas.staged.size(); ++m)
        for (const auto& [key, v] : cas.staged[m].entries())
            if (key.second.order() <= static_cast<int>(m))
                w.row({fmt(static_cast<long long>(m)), fmt(static_cast<long long>(key.first)), key.second.to_string(),
                       fmt(v.max_abs())});
    const GrowthReport g = growth_bound_check(cas.base, cas.staged, moment_matrix(*pp->p_bank().mother, s.cfg.L));
    return {{"", w.text()}, {"growth", g.csv()}};
}

Outputs run_carleson(const Setup& s) {
    const BetaKind kind = parse_beta_kind(s.cfg.beta_kind);
    const ConvolutionBank bank = make_bank(s.mothers(s.cfg.L + 1), s.scales);
    CsvWriter w({"seed", "M", "carleson_constant", "dyadic_bmo", "ratio"});
    std::string levels;
    for (unsigned long long seed : s.cfg.seeds) {
        const GridFunction F = make_beta(kind, s.grid, seed);
        const double bmo = dyadic_bmo_norm(F, s.grid.log2_points());
        for (int M = 0; M <= s.cfg.L; ++M) {
            const CarlesonReport r = bmo_m_constant(F, M, bank, s.grid.log2_points());
            w.row({fmt(static_cast<long long>(seed)), fmt(static_cast<long long>(M)), fmt(r.constant), fmt(bmo),
                   bmo > 0.0 ? fmt(r.constant / (bmo * bmo)) : "nan"});
            if (levels.empty()) levels = r.csv();
        }
    }
    return {{"", w.text()}, {"levels", levels}};
}

Outputs run_bony(const Setup& s) {
    const auto pp = s.bony(make_beta(parse_beta_kind(s.cfg.beta_kind), s.grid, s.cfg.seeds.empty() ? 0 : s.cfg.seeds[0]));
    // Narrow bumps near the centre, clear of the paraproduct's reach of the boundary.
    std::vector<GridFunction> fns;
    for (double c : {0.5, 0.47, 0.53}) {
        std::vector<double> v(s.grid.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            double r2 = 0.0;
            for (int d = 0; d < s.grid.dim(); ++d) r2 += std::pow((s.grid.position(i)[d] - c) / 0.06, 2);
            v[i] = r2 < 1.0 ? std::exp(-1.0 / (1.0 - r2)) : 0.0;
        }
        fns.emplace_back(s.grid, std::move(v));
    }
    const AdjointMomentReport adj = adjoint_moment_check(*pp, fns);
    CsvWriter car({"alpha", "carleson_constant", "dyadic_bmo"});
    const double bmo = dyadic_bmo_norm(pp->beta(), s.grid.log2_points());
    for (const MultiIndex& a : multi_indices_up_to(s.grid.dim(), s.cfg.L))
        car.row({a.to_string(), fmt(bony_moment_carleson(*pp, a, s.grid.log2_points()).constant), fmt(bmo)});
    const ConvolutionBank probe = make_bank(s.mothers(3), s.scales);
    const CascadeResult cas = s.cascade(pp);
    const OrthogonalityReport orth = orthogonality_probe(*cas.corrected, probe, s.cfg.L, s.cfg.delta);
    return {{"", adj.csv()}, {"moment_carleson", car.text()}, {"orthogonality", orth.csv()}};
}

Outputs run_hardy(const Setup& s) {
    const ConvolutionBank bank = make_bank(s.mothers(3), s.scales);
    std::vector<AtomSpec> atoms;
    for (int l : s.cfg.atom_levels)
        for (unsigned long long seed : s.cfg.seeds) atoms.push_back({l, seed});
    ExperimentOptions o;
    o.placement = AtomPlacement::Anchored;
    std::optional<CascadeResult> cas;
    std::optional<LpsoFamily> phi;
    if (s.cfg.family == "corrected") {
        cas = s.cascade(s.bony(make_beta(BetaKind::Half, s.grid)));
        o.smoothness = s.cfg.L + s.cfg.delta;
    } else {
        phi = LpsoFamily::convolution(std::make_shared<const KernelBank>(make_bank(s.mothers(0), s.scales).phi));
    }
    const LpsoFamily& fam = cas ? *cas->corrected : *phi;
    std::string body;
    CsvWriter sum({"p", "max_ratio", "min_ratio", "slope"});
    for (double p : s.cfg.p_list) {
        const ExperimentReport r = boundedness_experiment(fam, p, atoms, bank, o);
        const std::string csv = r.csv();
        body += body.empty() ? csv : csv.substr(csv.find('\n') + 1);
        sum.row({fmt(p), fmt(r.max_ratio), fmt(r.min_ratio), fmt(r.slope)});
    }
    return {{"", body}, {"summary", sum.text()}};
}

Outputs run_verify(const Setup& s, bool& all_pass) {
    const auto results = run_acceptance(acceptance_config(s.cfg), {}, [](const CriterionResult& r) {
        std::cout << format_line(r) << '\n' << std::flush;
    });
    // The CSV contract has no quoting, so commas inside free text become semicolons.
    auto cell = [](std::string t) {
        std::replace(t.begin(), t.end(), ',', ';');
        return t;
    };
    CsvWriter w({"criterion", "name", "pass", "detail"});
    Outputs out;
    all_pass = true;
    for (const auto& r : results) {
        w.row({fmt(static_cast<long long>(r.id)), cell(r.name), r.pass ? "1" : "0", cell(r.detail)});
        out.push_back({"c" + std::to_string(r.id), r.csv});
        all_pass = all_pass && r.pass;
    }
    out.insert(out.begin(), {"", w.text()});
    return out;
}

std::string utc_timestamp() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
    return buf;
}

template <class T>
std::string join(const std::vector<T>& v) {
    std::string s;
    for (const T& x : v) {
        if (!s.empty()) s += ",";
        if constexpr (std::is_floating_point_v<T>) s += fmt(x);
        else s += std::to_string(x);
    }
    return s;
}

std::string manifest(const std::string& sub, const ExperimentConfig& c, const std::string& stamp,
                     const std::vector<std::string>& files) {
    std::ostringstream m;
    m << "# run manifest\n"
      << "subcommand = " << sub << "\ntimestamp = " << stamp << "\n"
      << "dim = " << c.dim << "\ngrid_log2 = " << c.grid_log2 << "\nk_min = " << c.k_min << "\nk_max = " << c.k_max
      << "\nL = " << c.L << "\ndelta = " << fmt(c.delta) << "\np_list = " << join(c.p_list)
      << "\natom_levels = " << join(c.atom_levels) << "\nseeds = " << join(c.seeds) << "\nbeta_kind = " << c.beta_kind
      << "\nfamily = " << c.family << "\noutput_dir = " << c.output_dir << "\n"
      << "# conventions\n"
      << "scale_inequality = " << CarlesonReport::scale_convention << "\n"
      << "N_0 = " << kCubeOffset << "\n"
      << "fourier = int f(x) exp(+i x xi) dx\n"
      << "moments = [[L_k]]_a(x) = 2^{k|a|} int l_k(x,y) (x-y)^a dy\n"
      << "mothers = phi standard bump, psi in D_M, support radius 0.25\n"
      << "paraproduct = Pi_beta f = sum_j Q_j(beta) P_j f, beta = 1_[1/2,1) for cascade and hardy, beta_kind for bony and carleson\n"
      << "atoms = anchored at (0.5, 0.5); square-function H^p norm with psi in D_3\n"
      << "cube_centres = grid points (first + samples_per_side/2)\n"
      << "csv = '.' decimal, ',' delimiter, LF endings, header on line 1\n"
      << "threads = " << worker_count() << "\n"
      << "files = ";
    for (std::size_t i = 0; i < files.size(); ++i) m << (i ? "," : "") << files[i];
    m << "\n";
    return m.str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Littlewood-Paley operator laboratory"};
    std::string sub;
    app.add_option("subcommand", sub, "mothers | certify | cascade | carleson | bony | hardy | verify")
        ->required()
        ->check(CLI::IsMember(kSubcommands));
    std::string config_path;
    app.add_option("--config", config_path, "flat key = value config file");
    std::map<std::string, std::string> flags;
    const std::vector<std::pair<std::string, std::string>> mapping{
        {"--dim", "dim"},       {"--grid-log2", "grid_log2"},     {"--kmin", "k_min"}, {"--kmax", "k_max"},
        {"-L", "L"},            {"--delta", "delta"},             {"--p", "p_list"},   {"--atom-levels", "atom_levels"},
        {"--seeds", "seeds"},   {"--beta", "beta_kind"},          {"--family", "family"}, {"--out", "output_dir"}};
    for (const auto& [flag, key] : mapping) app.add_option(flag, flags[key], key);
    CLI11_PARSE(app, argc, argv);

    std::vector<std::string> errors;
    RawConfig raw;
    if (!config_path.empty()) read_config_file(config_path, raw, errors);
    for (const auto& [flag, key] : mapping)
        if (app.count(flag)) raw[key] = flags[key];
    const ExperimentConfig cfg = build_config(raw, errors);
    if (errors.empty()) errors = validate(sub, cfg);
    if (!errors.empty()) {
        std::cerr << "lpslab " << sub << ": configuration rejected\n";
        for (const auto& e : errors) std::cerr << "  - " << e << '\n';
        return 2;
    }

    Outputs outputs;
    bool all_pass = true;
    try {
        const Setup setup(cfg);
        if (sub == "mothers") outputs = run_mothers(setup);
        else if (sub == "certify") outputs = run_certify(setup);
        else if (sub == "cascade") outputs = run_cascade(setup);
        else if (sub == "carleson") outputs = run_carleson(setup);
        else if (sub == "bony") outputs = run_bony(setup);
        else if (sub == "hardy") outputs = run_hardy(setup);
        else outputs = run_verify(setup, all_pass);
    } catch (const std::exception& e) {
        std::cerr << "lpslab " << sub << ": " << e.what() << "\n(no files written)\n";
        return 3;
    }

    // Everything is computed; only now touch the output directory.
    const std::string stamp = utc_timestamp();
    std::vector<std::pair<std::string, std::string>> files;
    for (const auto& [part, text] : outputs)
        files.push_back({sub + (part.empty() ? "" : "_" + part) + "_" + stamp + ".csv", text});
    if (sub == "hardy") files.push_back({sub + "_" + stamp + ".gp", gnuplot_script(files.front().first)});
    std::vector<std::string> names;
    for (const auto& f : files) names.push_back(f.first);
    files.push_back({sub + "_" + stamp + ".manifest", manifest(sub, cfg, stamp, names)});
    try {
        fs::create_directories(cfg.output_dir);
        for (const auto& [name, text] : files) write_atomic(fs::path(cfg.output_dir) / name, text);
    } catch (const std::exception& e) {
        std::cerr << "lpslab " << sub << ": " << e.what() << '\n';
        return 3;
    }
    for (const auto& f : files) std::cout << "wrote " << (fs::path(cfg.output_dir) / f.first).string() << '\n';
    return all_pass ? 0 : 1;
}
