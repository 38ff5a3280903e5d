#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace eagers {

struct QARecord {
  std::string question_id;
  std::string question;
  std::string image;                    // as written in the split file
  std::filesystem::path image_path;     // resolved against the dataset root
  std::vector<std::string> answers;

  friend bool operator==(const QARecord&, const QARecord&) = default;
};

struct SkipEntry {
  std::string question_id;  // empty when the record had no usable id
  std::size_t position = 0; // index in the split file's data array
  std::string reason;
};

struct Dataset {
  std::filesystem::path root;
  std::vector<QARecord> records;
  std::vector<SkipEntry> skipped;
  std::string digest;  // SHA-256 over the accepted records
};

/// Loads a DocVQA-style split file: {"data": [{"questionId", "question",
/// "image", "answers"}, ...]}. Records with missing fields or missing/unreadable
/// images are skipped and reported; duplicate ids and unparseable JSON throw.
Dataset load_dataset(const std::filesystem::path& root, const std::filesystem::path& split_file);

/// One JSON object per line: {"questionId", "position", "reason"}.
std::string skip_report_jsonl(const std::vector<SkipEntry>& skipped);

std::string dataset_digest(const std::vector<QARecord>& records);

}  // namespace eagers
