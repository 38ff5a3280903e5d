#include "eagers/synth.hpp"

#include <random>

#include <nlohmann/json.hpp>

#include "eagers/codec.hpp"
#include "eagers/run_store.hpp"

namespace eagers::synth {

bool is_marker(const std::uint8_t* px) noexcept { return px[0] >= 200 && px[1] <= 60 && px[2] <= 60; }
bool is_decoy(const std::uint8_t* px) noexcept { return px[2] >= 200 && px[0] <= 60 && px[1] <= 60; }

namespace {

template <typename Pred>
std::size_t count_pixels(const ImageBuffer& img, Pred pred) {
  std::size_t n = 0;
  const auto px = img.pixels();
  for (std::size_t i = 0; i < px.size(); i += 3) n += pred(px.data() + i) ? 1 : 0;
  return n;
}

double pixel_count(const ImageBuffer& img) {
  return static_cast<double>(img.width()) * static_cast<double>(img.height());
}

}  // namespace

std::size_t count_marker_pixels(const ImageBuffer& img) { return count_pixels(img, is_marker); }

double marker_fraction(const ImageBuffer& img) {
  return static_cast<double>(count_pixels(img, is_marker)) / pixel_count(img);
}

double decoy_fraction(const ImageBuffer& img) {
  return static_cast<double>(count_pixels(img, is_decoy)) / pixel_count(img);
}

Rect marker_rect(CellIndex block) {
  const int x = block.col * kBlockSize;
  const int y = block.row * kBlockSize;
  return {x + 20, y + 18, x + 80, y + 38};
}

std::vector<PlantedItem> make_items(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> block(0, kBlocksPerSide - 1);
  std::uniform_int_distribution<int> digit(0, 9);
  std::uniform_int_distribution<int> letter(0, 25);
  std::vector<PlantedItem> items;
  items.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    PlantedItem item;
    item.question_id = std::to_string(1000 + i);
    item.question = "What is the reference code printed on form " + std::to_string(i + 1) + "?";
    item.image = "images/" + item.question_id + ".png";
    item.answer.push_back(static_cast<char>('A' + letter(rng)));
    item.answer.push_back(static_cast<char>('A' + letter(rng)));
    item.answer.push_back('-');
    for (int d = 0; d < 4; ++d) item.answer.push_back(static_cast<char>('0' + digit(rng)));
    item.marker_block = {block(rng), block(rng)};
    do {
      item.decoy_block = {block(rng), block(rng)};
    } while (item.decoy_block == item.marker_block);
    items.push_back(std::move(item));
  }
  return items;
}

ImageBuffer render(const PlantedItem& item, std::uint64_t seed) {
  ImageBuffer img(kPageSize, kPageSize);
  img.fill({0, 0, kPageSize, kPageSize}, 250, 250, 248);
  std::mt19937_64 rng(seed ^ fnv1a64(item.question_id));
  std::uniform_int_distribution<int> start(8, 60);
  std::uniform_int_distribution<int> length(60, 400);
  std::uniform_int_distribution<int> ink(30, 140);
  // Text-like grey bars, one per 14px line.
  for (int y = 10; y + 6 < kPageSize; y += 14) {
    const int x0 = start(rng);
    const int x1 = std::min(kPageSize - 8, x0 + length(rng));
    const auto g = static_cast<std::uint8_t>(ink(rng));
    img.fill({x0, y, x1, y + 6}, g, g, g);
  }
  const Rect marker = marker_rect(item.marker_block);
  img.fill(marker, kMarker.r, kMarker.g, kMarker.b);
  img.fill(marker_rect(item.decoy_block), kDecoy.r, kDecoy.g, kDecoy.b);
  return img;
}

std::vector<PlantedItem> write_corpus(const std::filesystem::path& dir, int count, std::uint64_t seed) {
  auto items = make_items(count, seed);
  std::filesystem::create_directories(dir / "images");
  nlohmann::json data = nlohmann::json::array();
  for (const auto& item : items) {
    write_png(dir / item.image, render(item, seed));
    data.push_back({{"questionId", std::stoll(item.question_id)},
                    {"question", item.question},
                    {"image", item.image},
                    {"answers", {item.answer}},
                    {"planted_block", {item.marker_block.row, item.marker_block.col}},
                    {"decoy_block", {item.decoy_block.row, item.decoy_block.col}}});
  }
  const nlohmann::json doc{{"dataset_name", "synthetic-planted"}, {"dataset_split", "val"}, {"data", data}};
  write_file_atomic(dir / "split.json", doc.dump(2) + "\n");
  return items;
}

}  // namespace eagers::synth
