#pragma once

#include <string>
#include <string_view>

#include "genreforge/dataset.hpp"
#include "genreforge/evaluation.hpp"

namespace genreforge::svg {

/// Standalone SVG documents. Each embeds the plotted numbers as a CSV-like
/// table (and the run config, if given) inside an XML comment so the data
/// can be recovered without the original run.

std::string confusion_heatmap(const eval::ConfusionMatrix& m, std::string_view title,
                              std::string_view config_json = {});

/// One circle per row, coloured by genre, with a ten-entry legend.
std::string pca_scatter(const dataset::FeatureTable& table, const eval::PcaModel& pca,
                        std::string_view title, std::string_view config_json = {});

/// One polyline per model: accuracy against SNR for each noise kind, with the
/// clean accuracy drawn as a dashed reference.
std::string accuracy_vs_snr(const eval::ExperimentReport& report, std::string_view title);

/// Makes text safe inside <!-- -->.
std::string comment_safe(std::string_view text);

}  // namespace genreforge::svg
