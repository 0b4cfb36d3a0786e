#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

// Reference values the checks compare against. The same numbers ship as
// files under data/; a unit test keeps the two in step.
namespace twostacks::golden {

/// s_0..s_19.
inline constexpr std::array<std::uint64_t, 20> kCoefficients = {
    1,           1,            2,             6,              24,              120,
    720,         5018,         39374,         337816,         3092691,         29659731,
    294107811,   2988678546,   30935695794,   324832481490,   3450158410649,   36993206191004,
    399827092167771, 4351269802153188};

struct Estimate {
  std::size_t n;
  double value;
  double std_dev;
};

/// Ensemble estimate of s_19 from s_0..s_18.
inline constexpr Estimate kHoldOut = {19, 4.351269803411739e15, 7979922};

/// Predicted coefficients, n = 20..25.
inline constexpr std::array<Estimate, 6> kPredictedCoefficients = {{
    {20, 4.764211695346e16, 9.207e6},
    {21, 5.24460896431e17, 9.83e8},
    {22, 5.8016808762e18, 7.962e10},
    {23, 6.446525027e19, 2.241e12},
    {24, 7.192361922e20, 7.34e13},
    {25, 8.05485154e21, 2.05e15},
}};

/// Predicted ratios, n = 20..25.
inline constexpr std::array<Estimate, 6> kPredictedRatios = {{
    {20, 1.094901468298879e+01, 2.11772356e-09},
    {21, 1.100834576534045e+01, 1.85143285e-08},
    {22, 1.106218007359570e+01, 8.68930350e-08},
    {23, 1.111147816281692e+01, 2.96091135e-07},
    {24, 1.115695963791318e+01, 8.01235631e-07},
    {25, 1.119917449576340e+01, 1.85222167e-06},
}};

/// Central values of the ratio analysis: s_n ~ a mu^n n^g, A = a Gamma(g + 1).
inline constexpr double kMu = 12.45;
inline constexpr double kG = -2.5;
inline constexpr double kAmplitudeA = 0.02;

}  // namespace twostacks::golden
