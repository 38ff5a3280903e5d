#include "eagers/dataset.hpp"

#include <gtest/gtest.h>

#include <fstream>

#include <nlohmann/json.hpp>

#include "eagers/error.hpp"
#include "eagers/imaging.hpp"
#include "temp_dir.hpp"

namespace eagers {
namespace {

using nlohmann::json;

class DatasetTest : public ::testing::Test {
 protected:
  testing::TempDir dir;

  void SetUp() override {
    std::filesystem::create_directories(dir / "documents");
    for (const char* name : {"a.png", "b.png", "c.png"}) write_png(dir / "documents" / name, ImageBuffer(4, 4));
    std::ofstream(dir / "documents" / "broken.png") << "not an image";
  }

  std::filesystem::path write_split(const json& data) {
    const auto p = dir / "val.json";
    std::ofstream(p) << json{{"dataset_name", "docvqa"}, {"data", data}}.dump(2);
    return p;
  }

  static json record(json id, const std::string& image) {
    return {{"questionId", id}, {"question", "What is the date?"}, {"image", image},
            {"answers", {"1 May", "May 1"}}, {"docId", 7}};
  }
};

TEST_F(DatasetTest, LoadsRecordsInFileOrder) {
  const auto split = write_split({record(3, "documents/c.png"), record(1, "documents/a.png"),
                                  record("x2", "documents/b.png")});
  const auto ds = load_dataset(dir.path(), split);
  ASSERT_EQ(ds.records.size(), 3u);
  EXPECT_EQ(ds.records[0].question_id, "3");
  EXPECT_EQ(ds.records[1].question_id, "1");
  EXPECT_EQ(ds.records[2].question_id, "x2");
  EXPECT_EQ(ds.records[0].answers, (std::vector<std::string>{"1 May", "May 1"}));
  EXPECT_TRUE(ds.records[0].image_path.is_absolute());
  EXPECT_TRUE(std::filesystem::exists(ds.records[0].image_path));
  EXPECT_TRUE(ds.skipped.empty());
  EXPECT_EQ(ds.digest, load_dataset(dir.path(), split).digest);
}

TEST_F(DatasetTest, SkipsInvalidRecords) {
  auto no_answers = record(2, "documents/b.png");
  no_answers.erase("answers");
  auto empty_answers = record(4, "documents/b.png");
  empty_answers["answers"] = json::array();
  const auto split = write_split({record(1, "documents/a.png"), no_answers, empty_answers,
                                  record(5, "documents/missing.png"), record(6, "documents/broken.png"),
                                  json{{"question", "no id"}}, 17});
  const auto ds = load_dataset(dir.path(), split);
  ASSERT_EQ(ds.records.size(), 1u);
  ASSERT_EQ(ds.skipped.size(), 6u);
  EXPECT_EQ(ds.skipped[0].question_id, "2");
  EXPECT_EQ(ds.skipped[0].position, 1u);
  EXPECT_EQ(ds.skipped[0].reason, "missing answers");
  EXPECT_EQ(ds.skipped[4].question_id, "");

  const auto jsonl = skip_report_jsonl(ds.skipped);
  std::istringstream in(jsonl);
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) {
    const auto j = json::parse(line);
    EXPECT_TRUE(j.contains("questionId") && j.contains("position") && j.contains("reason"));
    ++lines;
  }
  EXPECT_EQ(lines, 6);
}

TEST_F(DatasetTest, DuplicateIdNamesTheId) {
  const auto split = write_split({record(9, "documents/a.png"), record(9, "documents/b.png")});
  try {
    load_dataset(dir.path(), split);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDuplicateId);
    EXPECT_NE(std::string(e.what()).find("'9'"), std::string::npos);
  }
}

TEST_F(DatasetTest, FormatAndEmptyErrors) {
  std::ofstream(dir / "bad.json") << "{ nope";
  try {
    load_dataset(dir.path(), dir / "bad.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kFormat);
  }
  std::ofstream(dir / "nodata.json") << R"({"questions": []})";
  EXPECT_THROW(load_dataset(dir.path(), dir / "nodata.json"), Error);

  const auto split = write_split(json::array({record(1, "documents/missing.png")}));
  try {
    load_dataset(dir.path(), split);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kEmptyDataset);
  }
}

}  // namespace
}  // namespace eagers
