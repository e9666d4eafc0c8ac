#pragma once

#include <cstddef>

// Frozen parameter manifest behind `dsel repro-figures`. Values marked
// "interpretation" are sweep levels the source plots only describe
// qualitatively; everything else is fixed by the figure definitions. Bump
// kManifestVersion when any constant changes.

namespace dsel::figmanifest {

inline constexpr const char* kManifestVersion = "1";

// fig1: normalized hire composition vs tau1 under a biased signal mean.
// Both groups share sigma_f = sigma_s = 1 with noiseless ability signals.
inline constexpr double kFig1SigmaF = 1.0;
inline constexpr double kFig1SigmaS = 1.0;
inline constexpr double kFig1Lambdas[] = {0.50, 0.65, 0.80};
inline constexpr double kFig1Betas[] = {0.25, 0.5, 1.0, 1.5};  // interpretation
inline constexpr double kFig1Tau1Lo = 0.0;
inline constexpr double kFig1Tau1Step = 0.1;
inline constexpr std::size_t kFig1Tau1Count = 31;  // 0.0 .. 3.0

// fig2: normalized hire composition vs tau1 (> 0) under a signal-noise
// ratio r = sigma_s_tilde_B / sigma_s_tilde_A, with sigma_s_tilde_A = 1.
inline constexpr double kFig2SigmaF = 1.0;
inline constexpr double kFig2SigmaS = 1.0;
inline constexpr double kFig2Lambdas[] = {0.50, 0.65, 0.80};
inline constexpr double kFig2Ratios[] = {1.2, 1.5, 2.0, 2.5};  // interpretation
inline constexpr double kFig2Tau1Lo = 0.1;
inline constexpr double kFig2Tau1Step = 0.1;
inline constexpr std::size_t kFig2Tau1Count = 30;  // 0.1 .. 3.0

// Monte Carlo checkpoints used by the acceptance suite on the fig1/fig2
// families: closed-form disparity statistics are re-derived by simulation at
// these thresholds.
inline constexpr double kFairnessMcTau1[] = {0.5, 1.5};
inline constexpr std::size_t kFairnessMcTrials = 10'000;
inline constexpr std::size_t kFairnessMcHires = 100;

// fig3: optimal direct-review value, three panels.
//   (a) v* vs sigma_t at fixed observation noise sigma_e = 2, c_rev = 0.1.
//   (b) sigma_t vs alpha for sigma_f = 1, sigma_s = 1.5.
//   (c) v* vs alpha for sigma_f = 1, sigma_s = 1.5, sigma_ef = sigma_es = 0.5,
//       c_rev = 0.1.
inline constexpr double kFig3CRev = 0.1;
inline constexpr double kFig3SigmaE = 2.0;
inline constexpr double kFig3SigmaTLo = 0.5;   // interpretation (axis range)
inline constexpr double kFig3SigmaTStep = 0.05;
inline constexpr std::size_t kFig3SigmaTCount = 51;  // 0.5 .. 3.0
inline constexpr double kFig3SigmaF = 1.0;
inline constexpr double kFig3SigmaS = 1.5;
inline constexpr double kFig3SigmaEf = 0.5;
inline constexpr double kFig3SigmaEs = 0.5;
inline constexpr double kFig3AlphaStep = 0.01;
inline constexpr std::size_t kFig3AlphaCount = 101;  // 0.0 .. 1.0

// fig4: delegation gaps vs alpha at three agent thresholds.
inline constexpr double kFig4CRev = 0.1;
inline constexpr double kFig4SigmaF = 1.0;
inline constexpr double kFig4SigmaS = 2.0;
inline constexpr double kFig4SigmaFTilde = 1.12;
inline constexpr double kFig4SigmaSTilde = 2.06;
inline constexpr double kFig4Tau1s[] = {0.5, 1.0, 2.4};
inline constexpr double kFig4AlphaStep = 0.01;
inline constexpr std::size_t kFig4AlphaCount = 101;  // 0.0 .. 1.0

// fig5: heatmap grid of the same gaps over alpha in [0,1] x tau1 in [0,5],
// cells 0.05 x 0.25, each evaluated at its center. Population and cost as
// fig4.
inline constexpr double kFig5AlphaCell = 0.05;
inline constexpr std::size_t kFig5AlphaCells = 20;
inline constexpr double kFig5Tau1Cell = 0.25;
inline constexpr std::size_t kFig5Tau1Cells = 20;

// fig7: expected quality of a delegated hire vs sigma_s_tilde, one curve per
// alpha. sigma_s = 1; threshold fixed at tau1 = 1 (interpretation).
inline constexpr double kFig7SigmaF = 1.0;
inline constexpr double kFig7SigmaS = 1.0;
inline constexpr double kFig7Tau1 = 1.0;  // interpretation
inline constexpr double kFig7Alphas[] = {0.1, 0.3, 0.5, 0.7, 0.9};
inline constexpr double kFig7SigmaSTildeLo = 1.0;
inline constexpr double kFig7SigmaSTildeStep = 0.05;
inline constexpr std::size_t kFig7SigmaSTildeCount = 41;  // 1.0 .. 3.0

}  // namespace dsel::figmanifest
