#pragma once

#include <array>
#include <string>
#include <string_view>

#include "mof/matrix.hpp"

namespace mof {

/// One record of the UCI concrete slump test data: seven mix ingredients
/// (kg/m^3) and three responses.
struct ConcreteRecord {
  std::array<double, 7> features;  // cement, slag, fly ash, water, SP, coarse, fine
  std::array<double, 3> outputs;   // slump (cm), flow (cm), compressive strength (MPa)
};

inline constexpr std::array<std::string_view, 7> kConcreteFeatureNames = {
    "cement", "slag", "fly_ash", "water", "superplasticizer", "coarse_aggregate",
    "fine_aggregate"};

inline constexpr std::array<std::string_view, 3> kConcreteOutputNames = {"slump", "flow",
                                                                         "cs"};

/// Parses the UCI slump file: a header line, then comma-separated rows with a
/// leading record number, 7 features and 3 outputs. The record number column
/// is dropped. Malformed content raises std::runtime_error naming the line.
Dataset load_concrete(const std::string& path);

}  // namespace mof
