#include "radarcs/allocator.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "radarcs/errors.hpp"
#include "radarcs/rng.hpp"

namespace radarcs {

using nlohmann::json;

RateTable RateTable::algo1_default() { return RateTable{}; }

RateTable RateTable::algo2_default() {
    RateTable t;
    t.r1_range_blocks = 14;
    return t;
}

namespace {
int proportional_span(int paper_span, int rng_blocks) {
    int s = static_cast<int>(std::lround(static_cast<double>(paper_span) / 37.0 * rng_blocks));
    return std::clamp(s, 1, rng_blocks);
}
}  // namespace

RateTable RateTable::algo1_for_grid(const BlockGrid& grid) {
    RateTable t;
    t.near_range_blocks = proportional_span(18, grid.rng_blocks);
    t.r1_range_blocks = t.near_range_blocks;
    t.exact_budget = true;
    return t;
}

RateTable RateTable::algo2_for_grid(const BlockGrid& grid) {
    RateTable t = algo1_for_grid(grid);
    t.r1_range_blocks = std::min(proportional_span(14, grid.rng_blocks), t.near_range_blocks);
    return t;
}

RegionRates RateTable::rates_for(int chosen_azimuths, const BlockGrid& grid,
                                 double budget_fraction) const {
    if (chosen_azimuths < 1 || chosen_azimuths > grid.az_blocks)
        throw ParamError("rate table: chosen azimuth count " + std::to_string(chosen_azimuths) +
                         " outside 1.." + std::to_string(grid.az_blocks));
    if (!exact_budget) {
        auto it = rows.find(chosen_azimuths);
        if (it == rows.end())
            throw ParamError("rate table: no row for " + std::to_string(chosen_azimuths) +
                             " chosen azimuths (enable exact-budget mode)");
        return it->second;
    }
    // r1 = (B - r2*N_R2 - r3*N_R3) / N_R1 over the full near-range span.
    const int near = std::min(near_range_blocks, grid.rng_blocks);
    const double bs = grid.block_size();
    const double n_r1 = static_cast<double>(chosen_azimuths) * near * bs;
    const double n_r2 = static_cast<double>(grid.az_blocks - chosen_azimuths) * near * bs;
    const double n_r3 = static_cast<double>(grid.az_blocks) * (grid.rng_blocks - near) * bs;
    const double budget = budget_fraction * static_cast<double>(grid.frame_size());
    const double r1 = (budget - exact_r2 * n_r2 - exact_r3 * n_r3) / n_r1;
    if (!(r1 > exact_r2) || r1 > 1.0)
        throw ParamError("rate table: exact-budget r1 infeasible (budget too small or too large)");
    return RegionRates{r1, exact_r2, exact_r3};
}

namespace {
int count_for(double rate, int block_size) {
    if (rate <= 0.0) return 0;
    return std::max<int>(1, static_cast<int>(std::llround(rate * block_size)));
}

void finalize_counts(SamplingPlan& plan) {
    plan.counts.resize(plan.rates.size());
    for (std::size_t i = 0; i < plan.rates.size(); ++i)
        plan.counts[i] = count_for(plan.rates[i], plan.grid.block_size());
}
}  // namespace

void SamplingPlan::validate() const {
    const auto blocks = static_cast<std::size_t>(grid.total_blocks());
    if (rates.size() != blocks || counts.size() != blocks || regions.size() != blocks ||
        boosted.size() != blocks)
        throw DimensionError("SamplingPlan: per-block arrays must match the grid");
    for (std::size_t i = 0; i < blocks; ++i) {
        if (!(rates[i] >= 0.0 && rates[i] <= 1.0))
            throw ParamError("SamplingPlan: rate outside [0,1]");
        if (rates[i] > 0.0 && counts[i] < 1)
            throw ParamError("SamplingPlan: positive rate with zero measurements");
    }
    const double cap = std::ceil(total_budget_fraction * static_cast<double>(grid.frame_size())) +
                       static_cast<double>(grid.total_blocks());
    if (static_cast<double>(plan_total(*this)) > cap)
        throw ParamError("SamplingPlan: total measurements exceed budget plus rounding slack");
}

std::int64_t plan_total(const SamplingPlan& plan) {
    std::int64_t total = 0;
    for (int c : plan.counts) total += c;
    return total;
}

SamplingPlan uniform_plan(const BlockGrid& grid, double rate) {
    if (!(rate > 0.0 && rate <= 1.0)) throw ParamError("uniform_plan: rate must be in (0,1]");
    SamplingPlan plan;
    plan.grid = grid;
    plan.total_budget_fraction = rate;
    plan.rates.assign(static_cast<std::size_t>(grid.total_blocks()), rate);
    plan.regions.assign(plan.rates.size(), Region::R2);
    plan.boosted.assign(plan.rates.size(), 0);
    finalize_counts(plan);
    plan.validate();
    return plan;
}

std::set<int> top_up_azimuths(const std::set<int>& chosen, int az_blocks, int minimum,
                              std::uint64_t seed) {
    if (minimum > az_blocks)
        throw ParamError("top_up_azimuths: minimum exceeds azimuth block count");
    for (int a : chosen)
        if (a < 0 || a >= az_blocks) throw ParamError("top_up_azimuths: chosen index out of range");
    std::set<int> out = chosen;
    Rng rng(mix_seed(seed, 0x746f7075ULL));
    while (static_cast<int>(out.size()) < minimum) {
        std::vector<int> candidates;
        for (int a = 0; a < az_blocks; ++a)
            if (!out.contains(a)) candidates.push_back(a);
        out.insert(candidates[static_cast<std::size_t>(
            rng.uniform_int(0, static_cast<std::int64_t>(candidates.size()) - 1))]);
    }
    return out;
}

namespace {
SamplingPlan allocate(const std::set<int>& chosen, const std::vector<FlaggedBlock>& flagged,
                      const BlockGrid& grid, const RateTable& table, double budget_fraction) {
    for (int a : chosen)
        if (a < 0 || a >= grid.az_blocks) throw ParamError("allocate: chosen azimuth out of range");
    const int near = std::min(table.near_range_blocks, grid.rng_blocks);
    const int r1_span = std::min(table.r1_range_blocks, near);
    const auto rr = table.rates_for(static_cast<int>(chosen.size()), grid, budget_fraction);

    SamplingPlan plan;
    plan.grid = grid;
    plan.total_budget_fraction = budget_fraction;
    plan.chosen_azimuths = chosen;
    plan.rates.assign(static_cast<std::size_t>(grid.total_blocks()), 0.0);
    plan.regions.assign(plan.rates.size(), Region::R3);
    plan.boosted.assign(plan.rates.size(), 0);

    for (int a = 0; a < grid.az_blocks; ++a) {
        const bool is_chosen = chosen.contains(a);
        for (int r = 0; r < grid.rng_blocks; ++r) {
            const std::size_t i = plan.index({a, r});
            if (r >= near) {
                plan.regions[i] = Region::R3;
                plan.rates[i] = rr.r3;
            } else if (!is_chosen) {
                plan.regions[i] = Region::R2;
                plan.rates[i] = rr.r2;
            } else if (r < r1_span) {
                plan.regions[i] = Region::R1;
                plan.rates[i] = rr.r1;
            } else {
                // Chosen-azimuth blocks dropped by the shorter Algorithm-2
                // R1: unsampled; their full r1 budget funds the boost pool.
                plan.regions[i] = Region::R3;
                plan.rates[i] = 0.0;
            }
        }
    }

    // Saved budget in measurements, spent greedily on flagged blocks.
    double saved = rr.r1 * static_cast<double>(chosen.size()) * (near - r1_span) *
                   grid.block_size();
    if (!flagged.empty() && saved > 0.0) {
        std::vector<FlaggedBlock> order = flagged;
        std::stable_sort(order.begin(), order.end(),
                         [](const FlaggedBlock& x, const FlaggedBlock& y) {
                             if (x.hit_count != y.hit_count) return x.hit_count > y.hit_count;
                             return x.ref < y.ref;
                         });
        for (const auto& fb : order) {
            if (saved <= 0.0) break;
            if (fb.ref.az_idx < 0 || fb.ref.az_idx >= grid.az_blocks || fb.ref.rng_idx < 0 ||
                fb.ref.rng_idx >= grid.rng_blocks)
                throw ParamError("allocate: flagged block outside grid");
            const std::size_t i = plan.index(fb.ref);
            if (plan.regions[i] == Region::R1) continue;
            const double need = (rr.r1 - plan.rates[i]) * grid.block_size();
            if (need <= 0.0) continue;
            const double take = std::min(need, saved);
            plan.rates[i] += take / grid.block_size();
            plan.boosted[i] = 1;
            saved -= take;
        }
    }

    finalize_counts(plan);
    plan.validate();
    return plan;
}
}  // namespace

SamplingPlan allocate_algo1(const std::set<int>& chosen_azimuths, const BlockGrid& grid,
                            const RateTable& table, double budget_fraction) {
    RateTable t = table;
    t.r1_range_blocks = std::min(table.near_range_blocks, grid.rng_blocks);
    return allocate(chosen_azimuths, {}, grid, t, budget_fraction);
}

SamplingPlan allocate_algo2(const std::set<int>& chosen_azimuths,
                            const std::vector<FlaggedBlock>& flagged, const BlockGrid& grid,
                            const RateTable& table, double budget_fraction) {
    return allocate(chosen_azimuths, flagged, grid, table, budget_fraction);
}

SamplingPlan allocate_algo2(const std::set<int>& chosen_azimuths,
                            const std::set<BlockRef>& flagged, const BlockGrid& grid,
                            const RateTable& table, double budget_fraction) {
    std::vector<FlaggedBlock> fl;
    for (const auto& ref : flagged) fl.push_back({ref, 1});
    return allocate_algo2(chosen_azimuths, fl, grid, table, budget_fraction);
}

std::string plan_to_json(const SamplingPlan& plan) {
    json j;
    j["budget_fraction"] = plan.total_budget_fraction;
    j["grid"] = {{"az_blocks", plan.grid.az_blocks},
                 {"rng_blocks", plan.grid.rng_blocks},
                 {"block_az", plan.grid.block_az},
                 {"block_rng", plan.grid.block_rng}};
    j["chosen_azimuths"] = json::array();
    for (int a : plan.chosen_azimuths) j["chosen_azimuths"].push_back(a);
    auto blocks = json::array();
    for (int a = 0; a < plan.grid.az_blocks; ++a) {
        for (int r = 0; r < plan.grid.rng_blocks; ++r) {
            const BlockRef ref{a, r};
            blocks.push_back({{"az", a},
                              {"rng", r},
                              {"region", region_name(plan.region(ref))},
                              {"rate", plan.rate(ref)},
                              {"m", plan.count(ref)},
                              {"boosted", plan.is_boosted(ref)}});
        }
    }
    j["blocks"] = std::move(blocks);
    return j.dump(2) + "\n";
}

SamplingPlan plan_from_json(const std::string& text) {
    json j = json::parse(text);
    SamplingPlan plan;
    plan.total_budget_fraction = j.at("budget_fraction").get<double>();
    const auto& g = j.at("grid");
    plan.grid = BlockGrid{g.at("az_blocks").get<int>(), g.at("rng_blocks").get<int>(),
                          g.at("block_az").get<int>(), g.at("block_rng").get<int>()};
    for (const auto& a : j.at("chosen_azimuths")) plan.chosen_azimuths.insert(a.get<int>());
    const auto blocks = static_cast<std::size_t>(plan.grid.total_blocks());
    plan.rates.assign(blocks, 0.0);
    plan.counts.assign(blocks, 0);
    plan.regions.assign(blocks, Region::R3);
    plan.boosted.assign(blocks, 0);
    for (const auto& b : j.at("blocks")) {
        const BlockRef ref{b.at("az").get<int>(), b.at("rng").get<int>()};
        const std::size_t i = plan.index(ref);
        plan.rates[i] = b.at("rate").get<double>();
        plan.counts[i] = b.at("m").get<int>();
        const std::string region = b.at("region").get<std::string>();
        plan.regions[i] = region == "R1" ? Region::R1 : (region == "R2" ? Region::R2 : Region::R3);
        plan.boosted[i] = b.at("boosted").get<bool>() ? 1 : 0;
    }
    plan.validate();
    return plan;
}

}  // namespace radarcs
