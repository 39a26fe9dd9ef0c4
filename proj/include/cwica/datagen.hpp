#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cwica/matrix.hpp"
#include "cwica/rng.hpp"

namespace cwica {

enum class MixKind { nonlinear_synthetic, linear_synthetic, image_nonlinear, image_linear };

std::string to_string(MixKind kind);
MixKind mix_kind_from_string(const std::string& s);

struct Splits {
    std::vector<std::size_t> test;
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
};

/// Sources, observations, mixing metadata and split indices; the unit the
/// training and evaluation commands operate on.
struct Dataset {
    std::optional<Matrix> sources; // n x d, absent for real-world data
    Matrix observations;           // n x D
    MixKind kind = MixKind::nonlinear_synthetic;
    std::optional<Matrix> mix_a;
    std::optional<Matrix> mix_b;
    std::uint64_t seed = 0;
    bool normalized_obs = true;
    Splits splits;

    std::size_t latent_dim() const { return sources ? sources->cols() : 0; }
    Matrix observations_at(const std::vector<std::size_t>& idx) const;
    std::optional<Matrix> sources_at(const std::vector<std::size_t>& idx) const;
};

/// i.i.d. uniform entries on [-2, 2].
Matrix sample_mixing_matrix(std::size_t rows, std::size_t cols, Rng& rng);

/// Source bank: d columns drawn from six deterministic-plus-noise signals
/// (sine, square, sawtooth, frequency chirp, amplitude-modulated sine,
/// uniform noise), random phases, each standardized to mean 0 / std 1.
/// d > 6 cycles the bank with scaled frequencies.
Matrix gen_sources(std::size_t n, std::size_t d, Rng& rng);

/// X = tanh(tanh(Y A) B), elementwise tanh.
Matrix mix_nonlinear(const Matrix& y, const Matrix& a, const Matrix& b);

/// X = Y A.
Matrix mix_linear(const Matrix& y, const Matrix& a);

/// X = f(tanh(Y A) B) with f(x) = x^2 + x^3 elementwise; square A, B.
Matrix mix_image(const Matrix& y, const Matrix& a, const Matrix& b);

inline constexpr std::size_t kSyntheticSources = 6;
inline constexpr std::size_t kSyntheticObsDim = 24;
inline constexpr std::size_t kValidationRows = 500;
inline constexpr std::size_t kTestRows = 500;

/// Paper-protocol synthetic dataset: Y (d=6) mixed to D=24, test = first
/// 500 rows, train = the rest of the first `n`, plus 500 freshly generated
/// validation rows through the same mixing matrices (stored as rows
/// [n, n+500) of the observation matrix). `kind` selects
/// tanh(tanh(YA)B) or the plain linear map YA.
Dataset make_synthetic(MixKind kind, std::size_t n, std::uint64_t seed,
                       bool normalize_obs = true);

inline constexpr std::size_t kImageWidth = 100;
inline constexpr std::size_t kImageHeight = 67;

/// Default replication counts per dimension from the image protocol.
std::size_t default_image_replications(std::size_t dim);

/// Image-mixing study datasets. Sources are flattened 100x67 grayscale
/// images drawn from the corpus (one image per source); the pixel index is
/// the sample index (n = 6700). With an empty path list a deterministic
/// procedural-texture corpus of 100 images is generated instead, so the
/// pipeline runs without any third-party image set. Degenerate (constant)
/// images are rejected with a warning through `warn`.
std::vector<Dataset> make_image_dataset(
    const std::vector<std::filesystem::path>& image_paths, std::size_t dim,
    MixKind kind, std::uint64_t seed, std::size_t replications = 0,
    const std::function<void(const std::string&)>& warn = {});

/// Binary (P5) PGM loader; returns gray levels in [0, 1], any size.
Matrix load_pgm(const std::filesystem::path& path);

/// Bilinear resize to (rows, cols).
Matrix resize_bilinear(const Matrix& img, std::size_t rows, std::size_t cols);

/// Procedural grayscale texture corpus (gratings, blobs, checkers, value
/// noise, gradients), deterministic in rng. Each entry is height x width.
std::vector<Matrix> procedural_textures(std::size_t count, std::size_t height,
                                        std::size_t width, Rng& rng);

/// Directory layout: sources.csv, observations.csv, splits.json, meta.json.
/// Reload is bit-identical.
void save_dataset(const std::filesystem::path& dir, const Dataset& ds);
Dataset load_dataset(const std::filesystem::path& dir);

} // namespace cwica
