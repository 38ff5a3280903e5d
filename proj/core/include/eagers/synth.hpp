#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "eagers/geometry.hpp"
#include "eagers/imaging.hpp"

namespace eagers::synth {

// Synthetic "documents" for offline end-to-end runs: a 500x500 page of grey
// text-like bars with a red evidence marker in one 100x100 block and a blue
// decoy in another. Marker rects sit inside a single cell for both the 5x5
// and 5x10 grids and stay clear of 15% margins grown by neighbouring cells.

inline constexpr int kPageSize = 500;
inline constexpr int kBlockSize = 100;
inline constexpr int kBlocksPerSide = kPageSize / kBlockSize;

struct Rgb {
  std::uint8_t r, g, b;
};
inline constexpr Rgb kMarker{255, 0, 0};
inline constexpr Rgb kDecoy{0, 0, 255};

bool is_marker(const std::uint8_t* px) noexcept;
bool is_decoy(const std::uint8_t* px) noexcept;
std::size_t count_marker_pixels(const ImageBuffer& img);
double marker_fraction(const ImageBuffer& img);
double decoy_fraction(const ImageBuffer& img);

struct PlantedItem {
  std::string question_id;
  std::string question;
  std::string image;  // relative to the corpus root
  std::string answer;
  CellIndex marker_block;  // 5x5 block coordinates
  CellIndex decoy_block;
};

/// Marker footprint inside a 100px block: x in [20, 80), y in [18, 38).
Rect marker_rect(CellIndex block);

std::vector<PlantedItem> make_items(int count, std::uint64_t seed);
ImageBuffer render(const PlantedItem& item, std::uint64_t seed);

/// Writes images/<id>.png and split.json under `dir`; returns the items.
std::vector<PlantedItem> write_corpus(const std::filesystem::path& dir, int count,
                                      std::uint64_t seed);

}  // namespace eagers::synth
