#include "eagers/dataset.hpp"

#include <fstream>
#include <optional>
#include <set>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "eagers/codec.hpp"
#include "eagers/error.hpp"
#include "eagers/imaging.hpp"

namespace eagers {
namespace {

using nlohmann::json;

// DocVQA ids are integers; other splits use strings.
std::optional<std::string> id_of(const json& item) {
  const auto it = item.find("questionId");
  if (it == item.end()) return std::nullopt;
  if (it->is_number_integer()) return std::to_string(it->get<std::int64_t>());
  if (it->is_string() && !it->get<std::string>().empty()) return it->get<std::string>();
  return std::nullopt;
}

bool image_readable(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::uint8_t header[8] = {};
  in.read(reinterpret_cast<char*>(header), sizeof(header));
  return looks_like_image(std::span<const std::uint8_t>(header, static_cast<std::size_t>(in.gcount())));
}

}  // namespace

Dataset load_dataset(const std::filesystem::path& root, const std::filesystem::path& split_file) {
  std::string text;
  try {
    text = read_file_text(split_file);
  } catch (const Error& e) {
    throw Error(ErrorKind::kFormat, e.what());
  }
  const json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) {
    throw Error(ErrorKind::kFormat, split_file.string() + " is not valid JSON");
  }
  if (!doc.is_object() || !doc.contains("data") || !doc["data"].is_array()) {
    throw Error(ErrorKind::kFormat, split_file.string() + " has no top-level \"data\" array");
  }

  Dataset ds;
  ds.root = std::filesystem::absolute(root);
  std::set<std::string> seen;
  const auto& data = doc["data"];
  for (std::size_t i = 0; i < data.size(); ++i) {
    const json& item = data[i];
    auto skip = [&](std::string id, std::string reason) {
      spdlog::warn("skipping record {} ({}): {}", i, id.empty() ? "no id" : id, reason);
      ds.skipped.push_back({std::move(id), i, std::move(reason)});
    };
    if (!item.is_object()) {
      skip("", "record is not an object");
      continue;
    }
    const auto id = id_of(item);
    if (!id) {
      skip("", "missing questionId");
      continue;
    }
    if (!seen.insert(*id).second) {
      throw Error(ErrorKind::kDuplicateId, "duplicate questionId '" + *id + "' in " + split_file.string());
    }
    if (!item.contains("question") || !item["question"].is_string() ||
        item["question"].get<std::string>().empty()) {
      skip(*id, "missing question");
      continue;
    }
    if (!item.contains("image") || !item["image"].is_string() || item["image"].get<std::string>().empty()) {
      skip(*id, "missing image");
      continue;
    }
    if (!item.contains("answers") || !item["answers"].is_array() || item["answers"].empty()) {
      skip(*id, "missing answers");
      continue;
    }
    QARecord rec;
    rec.question_id = *id;
    rec.question = item["question"].get<std::string>();
    rec.image = item["image"].get<std::string>();
    rec.image_path = ds.root / rec.image;
    bool answers_ok = true;
    for (const auto& a : item["answers"]) {
      if (!a.is_string()) {
        answers_ok = false;
        break;
      }
      rec.answers.push_back(a.get<std::string>());
    }
    if (!answers_ok) {
      skip(*id, "answers must be strings");
      continue;
    }
    if (!image_readable(rec.image_path)) {
      skip(*id, "image not found or not PNG/JPEG: " + rec.image_path.string());
      continue;
    }
    ds.records.push_back(std::move(rec));
  }
  if (ds.records.empty()) {
    throw Error(ErrorKind::kEmptyDataset, split_file.string() + " has no usable records (" +
                                              std::to_string(ds.skipped.size()) + " skipped)");
  }
  ds.digest = dataset_digest(ds.records);
  return ds;
}

std::string skip_report_jsonl(const std::vector<SkipEntry>& skipped) {
  std::string out;
  for (const auto& s : skipped) {
    out += json{{"questionId", s.question_id}, {"position", s.position}, {"reason", s.reason}}.dump();
    out += '\n';
  }
  return out;
}

std::string dataset_digest(const std::vector<QARecord>& records) {
  json arr = json::array();
  for (const auto& r : records) {
    arr.push_back({r.question_id, r.question, r.image, r.answers});
  }
  return sha256_hex(arr.dump());
}

}  // namespace eagers
