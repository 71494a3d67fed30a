#pragma once

#include <json.hpp>

#include "hitkernel/bounds.hpp"
#include "hitkernel/invariants.hpp"
#include "hitkernel/kameko.hpp"
#include "hitkernel/qpspace.hpp"

namespace hitkernel::report {

using nlohmann::ordered_json;

inline constexpr int kSchema = 1;

inline ordered_json header(const std::string& command, int q, unsigned n)
{
    return ordered_json{{"schema", kSchema}, {"command", command}, {"q", q}, {"n", n}};
}

inline ordered_json weight_table(std::span<const WeightBlock> blocks)
{
    ordered_json t = ordered_json::array();
    for (const auto& b : blocks)
        t.push_back({{"omega", to_string(b.omega)}, {"dim", b.admissible.size()}});
    return t;
}

inline ordered_json basis(const DegreeSpace& ds)
{
    auto j = header("basis", ds.q(), ds.n());
    j["total_monomials"] = ds.total();
    j["rank"] = ds.rank();
    j["dim"] = ds.dim();
    j["weight_table"] = weight_table(weight_decomposition(ds));
    j["checkpoints"] = ds.stats().checkpoints_written;
    j["soft_marks"] = ds.stats().soft_marks;
    j["resumed"] = ds.stats().resumed;
    return j;
}

inline ordered_json kernel(const DegreeSpace& src, const KamekoKernel& kk, std::optional<unsigned> tgt_degree)
{
    auto j = header("kernel", src.q(), src.n());
    j["src"] = {{"q", src.q()}, {"n", src.n()}, {"dim", src.dim()}};
    j["tgt"] = {{"n", tgt_degree ? ordered_json(*tgt_degree) : ordered_json(nullptr)}, {"dim", kk.tgt_dim}};
    j["rank"] = kk.rank;
    j["kernel_dim"] = kk.dim();
    j["weight_table"] = weight_table(kernel_weight_table(src, kk));
    return j;
}

inline ordered_json polynomial_entry(const DegreeSpace& ds, std::span<const std::uint32_t> coords)
{
    const Polynomial p = ds.from_admissible(coords);
    return {{"terms", p.size()},
            {"weight", to_string(ds.admissible_weight(coords.front()))},
            {"polynomial", to_string(p)},
            {"coordinates", std::vector<std::uint32_t>(coords.begin(), coords.end())}};
}

inline ordered_json invariants(const DegreeSpace& ds, const InvariantReport& rep)
{
    auto j = header("invariants", rep.q, rep.n);
    j["route"] = rep.route;
    j["space_dim"] = rep.dim;
    if (rep.target_degree)
        j["target"] = {{"n", *rep.target_degree}, {"dim", rep.target_dim}};
    j["kernel_dim"] = rep.kernel_dim;
    j["kernel_weight_table"] = weight_table(rep.kernel_weights);
    ordered_json w = ordered_json::array();
    for (const auto& wi : rep.weights)
        w.push_back({{"omega", to_string(wi.omega)},
                     {"support", wi.support},
                     {"sigma_dim", wi.sigma.size()},
                     {"gl_dim", wi.gl.size()}});
    j["weightwise"] = w;
    j["top_weight"] = rep.top_weight ? ordered_json(to_string(*rep.top_weight)) : ordered_json(nullptr);
    j["kernel_invariant_dim"] = rep.kernel_invariants.size();
    j["lift"] = {{"run", rep.lift_step}, {"offered", rep.lifts_offered}, {"rank", rep.lift_rank}};
    j["dim"] = rep.invariants.size();
    ordered_json inv = ordered_json::array();
    for (const auto& v : rep.invariants)
        inv.push_back(polynomial_entry(ds, v));
    j["invariants"] = inv;
    return j;
}

inline ordered_json bounds(const RankBounds& b)
{
    auto j = header("bounds", b.q, b.n);
    j["total"] = b.total;
    j["spikes"] = b.spikes;
    j["w_bound"] = b.w_bound;
    j["lb_match"] = b.match.lb;
    j["edges"] = b.match.edges;
    j["max_degree"] = b.match.max_degree;
    j["exact_rank"] = b.exact_rank ? ordered_json(*b.exact_rank) : ordered_json(nullptr);
    j["dim"] = b.exact_rank ? ordered_json(b.total - *b.exact_rank) : ordered_json(nullptr);
    j["sandwich"] = b.exact_rank ? ordered_json(b.sandwich_holds()) : ordered_json(nullptr);
    return j;
}

inline ordered_json error(const Error& e)
{
    return {{"schema", kSchema}, {"error", e.what()}, {"reason", e.reason()}};
}

}  // namespace hitkernel::report
