// betaint: special functions, matrix-variate ensembles, and Selberg-type
// eigenvalue integral identities over the real normed division algebras.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "betaint/export.hpp"
#include "betaint/selberg.hpp"

namespace {

using namespace betaint;

std::string registered_cases() {
    std::string s;
    for (IdentityKind k : all_identity_kinds()) {
        if (!s.empty()) s += ", ";
        s += identity_kind_name(k);
    }
    return s;
}

std::string registered_ensembles() {
    std::string s;
    for (EnsembleKind k : all_ensemble_kinds()) {
        if (!s.empty()) s += ", ";
        s += ensemble_name(k);
    }
    return s;
}

// Matrix flags accept a scalar (sigma expands to sigma * I), an inline
// row-major comma list, or @path to a CSV file with real entries.
MatrixParam parse_matrix_param(const std::string& text, int beta, int p) {
    if (text.empty()) throw DomainError("empty matrix parameter");
    std::vector<double> values;
    if (text[0] == '@') {
        std::ifstream in(text.substr(1));
        if (!in) throw DomainError("cannot open matrix file " + text.substr(1));
        std::string line;
        while (std::getline(in, line)) {
            std::stringstream ss(line);
            std::string cell;
            while (std::getline(ss, cell, ','))
                if (!cell.empty()) values.push_back(std::stod(cell));
        }
    } else if (text.find(',') != std::string::npos) {
        std::stringstream ss(text);
        std::string cell;
        while (std::getline(ss, cell, ','))
            if (!cell.empty()) values.push_back(std::stod(cell));
    } else {
        return MatrixParam::scalar_matrix(beta, p, std::stod(text));
    }
    if (static_cast<int>(values.size()) != p * p)
        throw DomainError("matrix parameter needs p*p = " + std::to_string(p * p) +
                          " entries, got " + std::to_string(values.size()));
    DAMatrix m(beta, p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) m.set(i, j, Quat(values[i * p + j]));
    return MatrixParam::concrete(HermitianMatrix(m));
}

struct CommonOpts {
    std::uint64_t seed = 42;
    int workers = 1;
    std::size_t samples = 100000;
    double tol = 1e-8;
    int max_degree = 30;
    std::string out_format = "json";
    std::string out_path;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_report_out = true) {
    cmd->add_option("--seed", o.seed, "random seed")->envname("BETAINT_SEED");
    cmd->add_option("--workers", o.workers, "worker count")->check(CLI::PositiveNumber);
    cmd->add_option("--samples", o.samples, "Monte Carlo sample budget")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--tol", o.tol, "series tolerance");
    cmd->add_option("--max-degree", o.max_degree, "series truncation degree");
    if (with_report_out) {
        cmd->add_option("--out-format", o.out_format, "report format")
            ->check(CLI::IsMember({"json", "csv"}));
        cmd->add_option("--out", o.out_path, "report output path");
    }
}

struct CaseParams {
    std::string name;
    int p = 1, beta = 1;
    double n = 0, nu = 0, a1 = 0, a2 = 0;
    std::string sigma, theta = "1", omega = "1", psi = "0";
    std::string spec_name = "wishart";
    std::string convention = "definition-consistent";
};

IdentityCase build_case(const CaseParams& cp) {
    IdentityKind kind = identity_kind_from_name(cp.name);
    IdentityCase c;
    switch (kind) {
        case IdentityKind::wishart_gamma:
            c = wishart_gamma_case(cp.p, cp.beta, cp.n);
            break;
        case IdentityKind::t_beta:
            c = t_beta_case(cp.p, cp.beta, cp.n, cp.nu);
            break;
        case IdentityKind::gegenbauer_beta:
            c = gegenbauer_beta_case(cp.p, cp.beta, cp.n, cp.nu);
            break;
        case IdentityKind::kummer_beta1:
        case IdentityKind::kummer_beta2:
            c = kummer_beta_case(kind == IdentityKind::kummer_beta1 ? 1 : 2, cp.p, cp.beta,
                                 cp.a1, cp.a2,
                                 parse_matrix_param(cp.sigma.empty() ? "1" : cp.sigma, cp.beta,
                                                    cp.p));
            break;
        case IdentityKind::gen_kummer_beta1:
        case IdentityKind::gen_kummer_beta2:
            c = gen_kummer_beta_case(kind == IdentityKind::gen_kummer_beta1 ? 1 : 2, cp.p,
                                     cp.beta, cp.a1, cp.a2,
                                     parse_matrix_param(cp.theta, cp.beta, cp.p),
                                     parse_matrix_param(cp.omega, cp.beta, cp.p),
                                     parse_matrix_param(cp.psi, cp.beta, cp.p));
            break;
        case IdentityKind::general_density: {
            EnsembleKind ek = ensemble_from_name(cp.spec_name);
            EnsembleSpec spec;
            spec.kind = ek;
            spec.p = cp.p;
            spec.beta = cp.beta;
            spec.n = cp.n;
            spec.nu = cp.nu;
            spec.alpha1 = cp.a1;
            spec.alpha2 = cp.a2;
            if (ek == EnsembleKind::wishart || ek == EnsembleKind::kb1 ||
                ek == EnsembleKind::kb2)
                spec.sigma = parse_matrix_param(cp.sigma.empty() ? "1" : cp.sigma, cp.beta, cp.p);
            if (ek == EnsembleKind::gkb1 || ek == EnsembleKind::gkb2) {
                spec.theta = parse_matrix_param(cp.theta, cp.beta, cp.p);
                spec.omega = parse_matrix_param(cp.omega, cp.beta, cp.p);
                spec.psi = parse_matrix_param(cp.psi, cp.beta, cp.p);
            }
            c = general_density_case(spec);
            break;
        }
    }
    if (cp.convention == "paper-display") c.convention = Convention::paper_display;
    else if (cp.convention != "definition-consistent")
        throw DomainError("unknown convention: " + cp.convention);
    return c;
}

int run_verify(const CommonOpts& o, const CaseParams& cp, bool suite) {
    VerifyConfig cfg;
    cfg.samples = o.samples;
    cfg.seed = o.seed;
    cfg.workers = o.workers;
    cfg.tol = o.tol;
    cfg.max_degree = o.max_degree;

    std::vector<IdentityCase> cases;
    if (suite) cases = default_suite();
    else cases.push_back(build_case(cp));

    std::vector<VerificationReport> reports;
    bool all_pass = true;
    for (const IdentityCase& c : cases) {
        VerificationReport rep = verify(c, cfg);
        for (const MethodResult& m : rep.methods) std::cout << summary_line(rep, m) << "\n";
        all_pass = all_pass && rep.pass;
        reports.push_back(std::move(rep));
    }

    if (!o.out_path.empty()) {
        std::ofstream out(o.out_path, std::ios::binary);
        if (!out) throw DomainError("cannot write report to " + o.out_path);
        if (o.out_format == "csv") out << reports_to_csv(reports);
        else out << reports_to_json(reports, cfg).dump(2) << "\n";
    }
    return all_pass ? 0 : 1;
}

void write_samples(const std::string& prefix, const EnsembleSpec& spec, const CommonOpts& o,
                   std::size_t count) {
    SampleBatch batch = sample_batch(spec, count, o.seed, o.workers);
    std::ofstream csv(prefix + ".csv", std::ios::binary);
    if (!csv) throw DomainError("cannot write " + prefix + ".csv");
    write_samples_csv(csv, spec, batch.draws);
    std::ofstream mf(prefix + ".manifest.json", std::ios::binary);
    if (!mf) throw DomainError("cannot write " + prefix + ".manifest.json");
    mf << sample_manifest(spec, o.seed, o.workers, count, batch.acceptance_rate).dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"betaint: Selberg-type eigenvalue integrals over the division algebras"};
    app.require_subcommand(1);

    // ---- specfun -----------------------------------------------------------
    CLI::App* sf = app.add_subcommand("specfun", "evaluate special functions");
    sf->require_subcommand(1);
    struct {
        int p = 1, beta = 1, n = 1;
        double a = 1, b = 1;
        std::string kappa;
    } sfo;
    auto add_pb = [&sfo](CLI::App* c) {
        c->add_option("--p", sfo.p, "dimension");
        c->add_option("--beta", sfo.beta, "algebra dimension (1,2,4,8)");
    };
    CLI::App* sf_gamma = sf->add_subcommand("gamma", "multivariate gamma, log and value");
    add_pb(sf_gamma);
    sf_gamma->add_option("--a", sfo.a, "argument")->required();
    CLI::App* sf_beta = sf->add_subcommand("beta", "multivariate beta, log and value");
    add_pb(sf_beta);
    sf_beta->add_option("--a", sfo.a)->required();
    sf_beta->add_option("--b", sfo.b)->required();
    CLI::App* sf_poch = sf->add_subcommand("pochhammer", "generalized Pochhammer symbol");
    add_pb(sf_poch);
    sf_poch->add_option("--a", sfo.a)->required();
    sf_poch->add_option("--kappa", sfo.kappa, "partition, comma-separated")->required();
    CLI::App* sf_vol = sf->add_subcommand("stiefel-vol", "Stiefel manifold volume");
    add_pb(sf_vol);
    sf_vol->add_option("--n", sfo.n, "ambient dimension")->required();
    CLI::App* sf_rho = sf->add_subcommand("rho", "pi-power shift of the eigenvalue constant");
    add_pb(sf_rho);

    // ---- verify -------------------------------------------------------------
    CLI::App* vf = app.add_subcommand(
        "verify", "verify Selberg-type identities; registered cases: " + registered_cases());
    vf->set_config("--config", "", "flat key=value file; explicit flags win");
    CommonOpts vo;
    add_common(vf, vo);
    CaseParams cp;
    std::string suite_name;
    vf->add_option("--case", cp.name, "identity case, one of: " + registered_cases());
    vf->add_option("--suite", suite_name, "named suite (default)")
        ->check(CLI::IsMember({"default"}));
    vf->add_option("--p", cp.p);
    vf->add_option("--beta", cp.beta);
    vf->add_option("--n", cp.n);
    vf->add_option("--nu", cp.nu);
    vf->add_option("--a1", cp.a1);
    vf->add_option("--a2", cp.a2);
    vf->add_option("--sigma", cp.sigma, "scalar, inline row-major list, or @file.csv");
    vf->add_option("--theta", cp.theta, "scalar, inline row-major list, or @file.csv");
    vf->add_option("--omega", cp.omega, "scalar, inline row-major list, or @file.csv");
    vf->add_option("--psi", cp.psi, "scalar, inline row-major list, or @file.csv");
    vf->add_option("--spec", cp.spec_name,
                   "ensemble for general-density, one of: " + registered_ensembles());
    vf->add_option("--convention", cp.convention, "definition-consistent | paper-display");

    // ---- sample --------------------------------------------------------------
    CLI::App* sm = app.add_subcommand(
        "sample", "draw ensemble samples; registered ensembles: " + registered_ensembles());
    sm->set_config("--config", "", "flat key=value file; explicit flags win");
    CommonOpts so;
    add_common(sm, so, /*with_report_out=*/false);
    struct {
        std::string ensemble;
        int p = 1, beta = 1;
        double n = 0, nu = 0, a1 = 0, a2 = 0;
        std::string sigma = "1", theta = "1", omega = "1", psi = "0";
        std::size_t count = 1000;
        std::string out = "samples";
    } smo;
    sm->add_option("--ensemble", smo.ensemble, "one of: " + registered_ensembles())->required();
    sm->add_option("--p", smo.p);
    sm->add_option("--beta", smo.beta);
    sm->add_option("--n", smo.n);
    sm->add_option("--nu", smo.nu);
    sm->add_option("--a1", smo.a1);
    sm->add_option("--a2", smo.a2);
    sm->add_option("--sigma", smo.sigma, "scalar, inline row-major list, or @file.csv");
    sm->add_option("--theta", smo.theta, "scalar, inline row-major list, or @file.csv");
    sm->add_option("--omega", smo.omega, "scalar, inline row-major list, or @file.csv");
    sm->add_option("--psi", smo.psi, "scalar, inline row-major list, or @file.csv");
    sm->add_option("--count", smo.count, "number of draws")->check(CLI::PositiveNumber);
    sm->add_option("--out", smo.out, "output prefix: <out>.csv + <out>.manifest.json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sf->parsed()) {
            std::cout.precision(12);
            if (sf_gamma->parsed()) {
                double lg = mv_gamma_log(sfo.p, sfo.beta, sfo.a);
                std::cout << "log_value " << lg << "\nvalue " << std::exp(lg) << "\n";
            } else if (sf_beta->parsed()) {
                double lb = mv_beta_log(sfo.p, sfo.beta, sfo.a, sfo.b);
                std::cout << "log_value " << lb << "\nvalue " << std::exp(lb) << "\n";
            } else if (sf_poch->parsed()) {
                std::vector<int> parts;
                std::stringstream ss(sfo.kappa);
                std::string cell;
                while (std::getline(ss, cell, ','))
                    if (!cell.empty()) parts.push_back(std::stoi(cell));
                SignedLog v = pochhammer(sfo.a, Partition(parts), sfo.beta);
                std::cout << "log_magnitude " << v.log_abs << "\nsign " << v.sign << "\nvalue "
                          << v.value() << "\n";
            } else if (sf_vol->parsed()) {
                double lv = stiefel_log_volume(sfo.n, sfo.p, sfo.beta);
                std::cout << "log_value " << lv << "\nvalue " << std::exp(lv) << "\n";
            } else if (sf_rho->parsed()) {
                std::cout << "value " << rho(sfo.p, sfo.beta) << "\n";
            }
            return 0;
        }
        if (vf->parsed()) {
            bool suite = !suite_name.empty();
            if (!suite && cp.name.empty())
                throw DomainError("verify needs --case or --suite; registered cases: " +
                                  registered_cases());
            return run_verify(vo, cp, suite);
        }
        if (sm->parsed()) {
            EnsembleKind ek = ensemble_from_name(smo.ensemble);
            EnsembleSpec spec;
            spec.kind = ek;
            spec.p = smo.p;
            spec.beta = smo.beta;
            spec.n = smo.n;
            spec.nu = smo.nu;
            spec.alpha1 = smo.a1;
            spec.alpha2 = smo.a2;
            switch (ek) {
                case EnsembleKind::wishart:
                case EnsembleKind::kb1:
                case EnsembleKind::kb2:
                    spec.sigma = parse_matrix_param(smo.sigma, smo.beta, smo.p);
                    break;
                case EnsembleKind::gkb1:
                case EnsembleKind::gkb2:
                    spec.theta = parse_matrix_param(smo.theta, smo.beta, smo.p);
                    spec.omega = parse_matrix_param(smo.omega, smo.beta, smo.p);
                    spec.psi = parse_matrix_param(smo.psi, smo.beta, smo.p);
                    break;
                case EnsembleKind::normal:
                    throw DomainError(
                        "normal samples are rectangular; the CSV schema covers the Hermitian "
                        "quadratic-form ensembles");
                default:
                    break;
            }
            spec.validate();
            write_samples(smo.out, spec, so, smo.count);
            std::cout << "wrote " << smo.out << ".csv and " << smo.out << ".manifest.json\n";
            return 0;
        }
    } catch (const RejectionStall& e) {
        std::cerr << "error: " << e.what() << " (measured acceptance rate " << e.measured_rate
                  << ")\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
