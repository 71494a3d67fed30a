// hitkernel: admissible bases, Kameko kernels and GL(q)-invariants of QP_q.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "hitkernel/hitkernel.hpp"

namespace hk = hitkernel;
using hk::report::ordered_json;

namespace {

struct JobConfig {
    int q = 0;
    unsigned n = 0;
    unsigned threads = hk::default_threads();
    std::size_t mem_soft = std::size_t{512} << 20;
    std::size_t mem_hard = 0;
    std::string checkpoint;
    std::vector<std::string> library;
    std::string format = "text";
    std::string out;
    bool timing = false;
    bool direct = false;
    bool exact = false;
    bool oracle = false;
    std::string admissible_out;
    std::string file;
};

class Output {
public:
    explicit Output(const JobConfig& cfg)
        : json_(cfg.format == "json"), path_(cfg.out)
    {
    }

    bool json() const noexcept { return json_; }
    std::ostringstream& text() { return text_; }

    void emit(ordered_json j)
    {
        if (json_)
            text_ << j.dump(2) << '\n';
        if (path_.empty()) {
            std::cout << text_.str();
            return;
        }
        std::ofstream os(path_);
        if (!os)
            hk::fail(hk::ErrorKind::io, "cannot write " + path_);
        os << text_.str();
    }

private:
    bool json_;
    std::string path_;
    std::ostringstream text_;
};

class Timer {
public:
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

hk::BuildOptions build_options(const JobConfig& cfg)
{
    hk::require(cfg.mem_hard == 0 || cfg.mem_soft <= cfg.mem_hard, hk::ErrorKind::invalid_argument,
                "--mem-soft must not exceed --mem-hard");
    hk::BuildOptions o;
    o.threads = cfg.threads;
    o.mem_soft = cfg.mem_soft;
    o.mem_hard = cfg.mem_hard;
    o.checkpoint = cfg.checkpoint;
    return o;
}

void require_q(const JobConfig& cfg)
{
    hk::require(cfg.q >= 1 && cfg.q <= hk::kMaxVariables, hk::ErrorKind::invalid_argument,
                "--q must be between 1 and " + std::to_string(hk::kMaxVariables));
}

void add_timing(ordered_json& j, const JobConfig& cfg, const Timer& t)
{
    if (cfg.timing)
        j["elapsed"] = t.seconds();
}

void print_weights(std::ostream& os, std::span<const hk::WeightBlock> blocks)
{
    os << fmt::format("  {:<20} {:>8}\n", "omega", "dim");
    for (const auto& b : blocks)
        os << fmt::format("  {:<20} {:>8}\n", hk::to_string(b.omega), b.admissible.size());
}

int run_basis(const JobConfig& cfg)
{
    require_q(cfg);
    Timer timer;
    const auto ds = hk::build_degree_space(cfg.q, cfg.n, build_options(cfg));
    auto j = hk::report::basis(ds);
    add_timing(j, cfg, timer);
    if (!cfg.admissible_out.empty()) {
        std::ofstream os(cfg.admissible_out);
        if (!os)
            hk::fail(hk::ErrorKind::io, "cannot write " + cfg.admissible_out);
        for (std::size_t r = 0; r < ds.dim(); ++r)
            os << hk::to_string(ds.admissible_monomial(r)) << '\n';
    }
    Output out(cfg);
    if (!out.json()) {
        auto& os = out.text();
        os << fmt::format("(QP_{})_{}: {} monomials, rank {}, dim {}\n", cfg.q, cfg.n, ds.total(), ds.rank(),
                          ds.dim());
        print_weights(os, hk::weight_decomposition(ds));
        if (ds.stats().checkpoints_written)
            os << fmt::format("checkpoints written: {}\n", ds.stats().checkpoints_written);
        if (cfg.timing)
            os << fmt::format("elapsed: {:.2f} s\n", timer.seconds());
    }
    out.emit(j);
    return 0;
}

int run_kernel(const JobConfig& cfg)
{
    require_q(cfg);
    const auto td = hk::kameko_target_degree(cfg.q, cfg.n);
    hk::require(td.has_value(), hk::ErrorKind::invalid_argument,
                fmt::format("kernel needs n - q even and non-negative (q={}, n={})", cfg.q, cfg.n));
    Timer timer;
    const auto opts = build_options(cfg);
    const auto src = hk::build_degree_space(cfg.q, cfg.n, opts);
    const auto tgt = hk::build_degree_space(cfg.q, *td, opts);
    const auto kk = hk::kernel_basis(src, &tgt);
    auto j = hk::report::kernel(src, kk, td);
    add_timing(j, cfg, timer);
    Output out(cfg);
    if (!out.json()) {
        auto& os = out.text();
        os << fmt::format("Kameko map (QP_{0})_{1} -> (QP_{0})_{2}: dim {3} -> {4}, rank {5}\n", cfg.q, cfg.n, *td,
                          src.dim(), tgt.dim(), kk.rank);
        os << fmt::format("kernel dim {}\n", kk.dim());
        print_weights(os, hk::kernel_weight_table(src, kk));
        if (cfg.timing)
            os << fmt::format("elapsed: {:.2f} s\n", timer.seconds());
    }
    out.emit(j);
    return 0;
}

std::vector<hk::Polynomial> load_library(const JobConfig& cfg, unsigned degree)
{
    std::vector<std::string> files;
    for (const auto& p : cfg.library) {
        if (std::filesystem::is_directory(p)) {
            std::vector<std::string> found;
            for (const auto& e : std::filesystem::directory_iterator(p))
                if (e.is_regular_file() && e.path().extension() == ".poly")
                    found.push_back(e.path().string());
            std::ranges::sort(found);
            files.insert(files.end(), found.begin(), found.end());
        } else {
            files.push_back(p);
        }
    }
    std::vector<hk::Polynomial> out;
    for (const auto& f : files) {
        auto pf = hk::read_polynomial_file(f);
        if (pf.q == cfg.q && pf.n == degree)
            out.push_back(std::move(pf.poly));
    }
    return out;
}

int run_invariants(const JobConfig& cfg)
{
    require_q(cfg);
    Timer timer;
    const auto opts = build_options(cfg);
    const auto td = hk::kameko_target_degree(cfg.q, cfg.n);
    hk::InvariantOptions io;
    io.threads = cfg.threads;
    io.build = opts;
    if (td && !cfg.library.empty())
        io.library = load_library(cfg, *td);

    const auto ds = hk::build_degree_space(cfg.q, cfg.n, opts);
    std::optional<hk::DegreeSpace> tgt;
    if (td && !cfg.direct)
        tgt = hk::build_degree_space(cfg.q, *td, opts);
    const auto rep = hk::invariants_of(ds, tgt ? &*tgt : nullptr, io);

    auto j = hk::report::invariants(ds, rep);
    add_timing(j, cfg, timer);
    Output out(cfg);
    if (!out.json()) {
        auto& os = out.text();
        os << fmt::format("(QP_{})_{}: dim {}, route {}", cfg.q, cfg.n, rep.dim, rep.route);
        if (rep.target_degree)
            os << fmt::format(", target degree {} (dim {})", *rep.target_degree, rep.target_dim);
        os << fmt::format(", kernel dim {}\n", rep.kernel_dim);
        os << fmt::format("  {:<20} {:>8} {:>8} {:>8}\n", "omega", "support", "Sigma", "GL");
        for (const auto& w : rep.weights)
            os << fmt::format("  {:<20} {:>8} {:>8} {:>8}\n", hk::to_string(w.omega), w.support, w.sigma.size(),
                              w.gl.size());
        os << fmt::format("kernel GL({}) invariants: {}\n", cfg.q, rep.kernel_invariants.size());
        if (rep.lift_step)
            os << fmt::format("lifted target invariants: {} offered, {} survive correction\n", rep.lifts_offered,
                              rep.lift_rank);
        os << fmt::format("dim [(QP_{0})_{1}]^GL({0}) = {2}\n", cfg.q, cfg.n, rep.invariants.size());
        for (std::size_t i = 0; i < rep.polynomials.size(); ++i)
            os << fmt::format("invariant {} ({} terms, weight {}):\n  {}\n", i + 1, rep.polynomials[i].size(),
                              hk::to_string(ds.admissible_weight(rep.invariants[i].front())),
                              hk::to_string(rep.polynomials[i]));
        if (cfg.timing)
            os << fmt::format("elapsed: {:.2f} s\n", timer.seconds());
    }
    out.emit(j);
    return 0;
}

int run_bounds(const JobConfig& cfg)
{
    require_q(cfg);
    Timer timer;
    std::optional<std::uint64_t> exact;
    if (cfg.exact)
        exact = hk::build_degree_space(cfg.q, cfg.n, build_options(cfg)).rank();
    const auto b = hk::rank_bounds(cfg.q, cfg.n, exact);
    auto j = hk::report::bounds(b);
    add_timing(j, cfg, timer);
    Output out(cfg);
    if (!out.json()) {
        auto& os = out.text();
        os << fmt::format("{:>4} {:>5} {:>12} {:>12} {:>12} {:>12} {:>12}\n", "q", "n", "total", "spikes", "W", "LB",
                          "exact");
        os << fmt::format("{:>4} {:>5} {:>12} {:>12} {:>12} {:>12} {:>12}\n", b.q, b.n, b.total, b.spikes,
                          b.w_bound, b.match.lb, exact ? std::to_string(*exact) : std::string("-"));
    }
    out.emit(j);
    return 0;
}

int run_spikes(const JobConfig& cfg)
{
    require_q(cfg);
    const auto s = hk::count_spikes(cfg.q, cfg.n);
    auto j = hk::report::header("spikes", cfg.q, cfg.n);
    j["spikes"] = s;
    Output out(cfg);
    if (!out.json())
        out.text() << fmt::format("S_{}({}) = {}\n", cfg.q, cfg.n, s);
    out.emit(j);
    return 0;
}

int run_verify(JobConfig cfg)
{
    auto pf = hk::read_polynomial_file(cfg.file);
    if (cfg.q != 0)
        hk::require(cfg.q == pf.q && cfg.n == pf.n, hk::ErrorKind::invalid_argument,
                    fmt::format("{} is for q={} n={}, not q={} n={}", cfg.file, pf.q, pf.n, cfg.q, cfg.n));
    cfg.q = pf.q;
    cfg.n = pf.n;
    Timer timer;
    const auto ds = hk::build_degree_space(cfg.q, cfg.n, build_options(cfg));
    const auto check = hk::check_invariant(pf.poly, ds);
    const auto coords = ds.reduce_to_admissible(pf.poly);

    auto j = hk::report::header("verify", cfg.q, cfg.n);
    j["file"] = std::filesystem::path(cfg.file).filename().string();
    j["terms"] = pf.poly.size();
    j["admissible_terms"] = coords.size();
    j["residuals"] = check.residuals;
    j["invariant"] = check.invariant;
    add_timing(j, cfg, timer);
    Output out(cfg);
    if (!out.json()) {
        auto& os = out.text();
        os << fmt::format("{}: q={} n={}, {} terms, {} admissible coordinates\n", j["file"].get<std::string>(), cfg.q,
                          cfg.n, pf.poly.size(), coords.size());
        for (std::size_t i = 0; i < check.residuals.size(); ++i)
            os << fmt::format("  rho_{}: residual {}\n", i + 1, check.residuals[i]);
        os << (check.invariant ? "PASS: GL-invariant\n" : "FAIL: not GL-invariant\n");
    }
    out.emit(j);
    return check.invariant ? 0 : 1;
}

int run_diff_oracle(const JobConfig& cfg)
{
    hk::require(cfg.oracle, hk::ErrorKind::invalid_argument, "diff-oracle needs --oracle");
    require_q(cfg);
    // The dense side is the one that can be out of reach; fail before the streaming build.
    const auto dense = hk::oracle::dense_quotient(cfg.q, cfg.n);
    const auto ds = hk::build_degree_space(cfg.q, cfg.n, build_options(cfg));
    const bool dim_ok = dense.basis.size() == ds.dim();

    auto j = hk::report::header("diff-oracle", cfg.q, cfg.n);
    j["dim"] = {{"streaming", ds.dim()}, {"oracle", dense.basis.size()}, {"match", dim_ok}};
    bool inv_ok = true;
    if (ds.dim() <= hk::oracle::kInvariantGuard) {
        const auto rep = hk::full_space_invariants(cfg.q, cfg.n, {cfg.threads, build_options(cfg), std::nullopt});
        const auto oracle_dim = hk::oracle::dense_invariant_dim(cfg.q, cfg.n);
        inv_ok = oracle_dim == rep.invariants.size();
        j["invariant_dim"] = {{"pipeline", rep.invariants.size()}, {"oracle", oracle_dim}, {"match", inv_ok}};
    } else {
        j["invariant_dim"] = nullptr;
    }
    Output out(cfg);
    if (!out.json()) {
        auto& os = out.text();
        os << fmt::format("dim (QP_{})_{}: streaming {}, oracle {} -> {}\n", cfg.q, cfg.n, ds.dim(),
                          dense.basis.size(), dim_ok ? "match" : "MISMATCH");
        if (j["invariant_dim"].is_object())
            os << fmt::format("invariant dim: pipeline {}, oracle {} -> {}\n",
                              j["invariant_dim"]["pipeline"].get<std::size_t>(),
                              j["invariant_dim"]["oracle"].get<std::size_t>(), inv_ok ? "match" : "MISMATCH");
    }
    out.emit(j);
    return dim_ok && inv_ok ? 0 : 1;
}

int exit_code(hk::ErrorKind kind)
{
    switch (kind) {
    case hk::ErrorKind::internal:
        return 1;
    default:
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Admissible bases, Kameko kernels and GL(q)-invariants of QP_q over F2"};
    app.require_subcommand(1);
    JobConfig cfg;

    auto common = [&](CLI::App* sub, bool need_qn) {
        auto* q = sub->add_option("--q", cfg.q, "number of variables");
        auto* n = sub->add_option("--n", cfg.n, "degree");
        if (need_qn) {
            q->required();
            n->required();
        }
        sub->add_option("--threads", cfg.threads, "worker threads (default: HITKERNEL_THREADS or all cores)")
            ->check(CLI::PositiveNumber);
        sub->add_option("--mem-soft", cfg.mem_soft, "soft memory threshold in bytes (checkpoint and continue)");
        sub->add_option("--mem-hard", cfg.mem_hard, "hard memory threshold in bytes (checkpoint and stop)");
        sub->add_option("--checkpoint", cfg.checkpoint, "checkpoint file for the streaming build");
        sub->add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"text", "json"}));
        sub->add_option("--out", cfg.out, "write the report to a file");
        sub->add_flag("--timing", cfg.timing, "include elapsed time in reports");
    };

    auto* basis = app.add_subcommand("basis", "admissible basis of (QP_q)_n and its weight table");
    common(basis, true);
    basis->add_option("--admissible", cfg.admissible_out, "write admissible exponent tuples, one per line");

    auto* kernel = app.add_subcommand("kernel", "kernel of the Kameko map out of degree n");
    common(kernel, true);

    auto* inv = app.add_subcommand("invariants", "GL(q)-invariants of (QP_q)_n");
    common(inv, true);
    inv->add_option("--library", cfg.library, "target-degree invariant files or directories");
    inv->add_flag("--direct", cfg.direct, "skip the Kameko route and solve on the whole space");

    auto* bounds = app.add_subcommand("bounds", "spike count, column bound and matching bound on the rank");
    common(bounds, true);
    bounds->add_flag("--exact", cfg.exact, "also compute the exact rank");

    auto* spikes = app.add_subcommand("spikes", "closed-form spike count S_q(n)");
    common(spikes, true);

    auto* verify = app.add_subcommand("verify", "check GL(q)-invariance of a polynomial file");
    common(verify, false);
    verify->add_option("file", cfg.file, "polynomial file with header \"q=<q> n=<n>\"")->required();

    auto* diff = app.add_subcommand("diff-oracle", "compare against the dense brute-force oracle");
    common(diff, true);
    diff->add_flag("--oracle", cfg.oracle, "enable the oracle (required)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (basis->parsed())
            return run_basis(cfg);
        if (kernel->parsed())
            return run_kernel(cfg);
        if (inv->parsed())
            return run_invariants(cfg);
        if (bounds->parsed())
            return run_bounds(cfg);
        if (spikes->parsed())
            return run_spikes(cfg);
        if (verify->parsed())
            return run_verify(cfg);
        if (diff->parsed())
            return run_diff_oracle(cfg);
    } catch (const hk::Error& e) {
        if (cfg.format == "json")
            std::cout << hk::report::error(e).dump(2) << '\n';
        else
            std::cerr << "error (" << e.reason() << "): " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        if (cfg.format == "json")
            std::cout << ordered_json{{"schema", hk::report::kSchema}, {"error", e.what()}, {"reason", "internal"}}
                             .dump(2)
                      << '\n';
        else
            std::cerr << "error (internal): " << e.what() << '\n';
        return 1;
    }
    return 1;
}
