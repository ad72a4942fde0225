// SPDX-License-Identifier: Apache-2.0
#include <fmt/format.h>

#include "rsma_sgf/experiment.hpp"

namespace rsma_sgf {

namespace {

// Transmit SNR axes run 0..40 dB in 5 dB steps.
constexpr const char* kGrid = "snr_db = 0:5:40\n";

std::vector<std::string> outage_bundle(const std::string& name, const std::string& setup,
                                       const std::string& grid = kGrid,
                                       const std::string& k_list = "1, 5")
{
    const std::string common =
        setup + grid + "k_list = " + k_list + "\ntrials = 1000000\nseed = 1\n";
    return {
        "name = " + name + "\nschemes = rsma_sgf\nmethods = mc, mc_gb, theorem1\n" + common,
        "name = " + name + "\nschemes = noma_sgf_no_rs\nmethods = mc, mc_gb\n" + common,
        "name = " + name + "\nschemes = oma_gb_only\nmethods = mc_gb\n" + common,
    };
}

} // namespace

std::vector<std::string> figure_ids()
{
    return {"2a", "2b", "3a", "3b", "4a", "4b", "5a", "5b", "6", "7"};
}

std::vector<std::string> figure_spec_texts(std::string_view id)
{
    if (id == "2a")
        return outage_bundle("fig2a", "power_rule = fixed_ratio\nratio = 0.1\nrate_b = 1.5\nrate_f = 2\n");
    if (id == "2b")
        return outage_bundle("fig2b", "power_rule = fixed_ratio\nratio = 0.1\nrate_b = 2\nrate_f = 1.5\n");
    if (id == "3a")
        return outage_bundle("fig3a", "power_rule = equal\nrate_b = 2\nrate_f = 1.5\n");
    if (id == "3b")
        return outage_bundle("fig3b",
                             "power_rule = fixed_pb\np_b_fixed_db = 10\nrate_b = 1.5\nrate_f = 2\n");
    if (id == "4a")
        return {std::string("name = fig4a\nschemes = rsma_sgf\nmethods = mc, theorem1\n"
                            "power_rule = equal\nrate_b = 2\nrate_f = 1.5\nk_list = 1, 2, 3, 5\n"
                            "trials = 1000000\nseed = 1\n") +
                kGrid};
    if (id == "4b") {
        const std::string common = std::string("schemes = rsma_sgf\npower_rule = equal\n"
                                               "rate_b = 1.5\nrate_f = 2\n") +
                                   kGrid;
        return {
            "name = fig4b\nk_list = 1\nmethods = theorem1, corollary3\n" + common,
            "name = fig4b\nk_list = 2, 3, 5\nmethods = theorem1, theorem2, corollary2\n" + common,
        };
    }
    if (id == "5a")
        return outage_bundle("fig5a", "power_rule = equal\nrate_b = 2\nrate_f = 0.5:0.5:4\n",
                             "snr_db = 15\n");
    if (id == "5b")
        return outage_bundle("fig5b", "power_rule = equal\nrate_b = same\nrate_f = 0.5:0.5:4\n",
                             "snr_db = 20\n");
    if (id == "6")
        return outage_bundle("fig6", "power_rule = equal\nrate_b = 2\nrate_f = 1.5\n",
                             "snr_db = 10, 20, 30\n", "1:1:8");
    if (id == "7") {
        // The target rate of the GF users is not given for this figure; 1.5 is assumed.
        const std::string common = std::string("power_rule = equal\nrate_b = 4\nrate_f = 1.5\n"
                                               "k_list = 1, 5\ntrials = 1000000\nseed = 1\n") +
                                   kGrid;
        return {
            "name = fig7\nschemes = rsma_sgf, noma_sgf_no_rs\nmethods = ergodic_gf, ergodic_sum\n" +
                common,
            "name = fig7\nschemes = oma_gb_only\nmethods = ergodic_sum\n" + common,
        };
    }
    throw SpecError(fmt::format("unknown figure '{}'", id));
}

} // namespace rsma_sgf
