#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "radarcs/frame.hpp"
#include "radarcs/guidance.hpp"

namespace radarcs {

struct RegionRates {
    double r1 = 0.0;
    double r2 = 0.0;
    double r3 = 0.0;
};

/// Per-azimuth-count sampling rates plus the region geometry they assume.
/// The default rows reproduce the 10%-budget table for the 8x37 grid:
/// 4 azimuths -> 30.8/5/2.5%, 5 -> 25.5%, 6 -> 20.2%. r1_range_blocks is the
/// chosen-azimuth high-rate span (18 under Algorithm 1, 14 under Algorithm 2);
/// near_range_blocks is the R2/R3 boundary and the span the r1 rates were
/// budgeted for, so Algorithm 2's saved budget covers
/// (near_range_blocks - r1_range_blocks) blocks per chosen azimuth.
struct RateTable {
    std::map<int, RegionRates> rows = {
        {4, {0.308, 0.05, 0.025}},
        {5, {0.255, 0.05, 0.025}},
        {6, {0.202, 0.05, 0.025}},
    };
    int r1_range_blocks = 18;
    int near_range_blocks = 18;
    /// Derive r1 from the budget instead of the rows: covers azimuth counts
    /// the table does not list.
    bool exact_budget = false;
    double exact_r2 = 0.05;
    double exact_r3 = 0.025;

    static RateTable algo1_default();
    static RateTable algo2_default();
    /// Proportional spans (18/37 and 14/37 of the range extent) with
    /// exact-budget rates; for grids other than the 8x37 default.
    static RateTable algo1_for_grid(const BlockGrid& grid);
    static RateTable algo2_for_grid(const BlockGrid& grid);

    RegionRates rates_for(int chosen_azimuths, const BlockGrid& grid,
                          double budget_fraction) const;
};

struct SamplingPlan {
    BlockGrid grid;
    double total_budget_fraction = 0.10;
    std::vector<double> rates;          // az_idx*rng_blocks + rng_idx
    std::vector<int> counts;            // measurements per block
    std::vector<Region> regions;
    std::vector<std::uint8_t> boosted;
    std::set<int> chosen_azimuths;

    std::size_t index(const BlockRef& ref) const {
        return static_cast<std::size_t>(ref.az_idx) * grid.rng_blocks + ref.rng_idx;
    }
    double rate(const BlockRef& ref) const { return rates[index(ref)]; }
    int count(const BlockRef& ref) const { return counts[index(ref)]; }
    Region region(const BlockRef& ref) const { return regions[index(ref)]; }
    bool is_boosted(const BlockRef& ref) const { return boosted[index(ref)] != 0; }

    /// Throws if a rate leaves [0,1], a positive rate has a zero count, or the
    /// total exceeds the budget plus one-measurement-per-block rounding slack.
    void validate() const;
};

std::int64_t plan_total(const SamplingPlan& plan);

SamplingPlan uniform_plan(const BlockGrid& grid, double rate);

/// Adds seeded random distinct azimuth blocks until at least `minimum` are
/// chosen (the "only 3 azimuth blocks" top-up rule).
std::set<int> top_up_azimuths(const std::set<int>& chosen, int az_blocks, int minimum,
                              std::uint64_t seed);

SamplingPlan allocate_algo1(const std::set<int>& chosen_azimuths, const BlockGrid& grid,
                            const RateTable& table, double budget_fraction = 0.10);

/// Algorithm 2: R1 shrinks to table.r1_range_blocks; the budget saved on the
/// dropped chosen-azimuth blocks is spent raising flagged blocks toward r1,
/// highest CFAR hit count first. Leftover savings are discarded.
SamplingPlan allocate_algo2(const std::set<int>& chosen_azimuths,
                            const std::vector<FlaggedBlock>& flagged, const BlockGrid& grid,
                            const RateTable& table, double budget_fraction = 0.10);

SamplingPlan allocate_algo2(const std::set<int>& chosen_azimuths,
                            const std::set<BlockRef>& flagged, const BlockGrid& grid,
                            const RateTable& table, double budget_fraction = 0.10);

std::string plan_to_json(const SamplingPlan& plan);
SamplingPlan plan_from_json(const std::string& text);

}  // namespace radarcs
