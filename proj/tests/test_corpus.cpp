#include <doctest.h>

#include <fstream>
#include <set>

#include "rex/corpus.hpp"
#include "rex/error.hpp"
#include "rex/io.hpp"
#include "test_helpers.hpp"

using namespace rex;

namespace {

corpus::ExpertRanking ranking_with_grades(const std::vector<int>& grades) {
    corpus::ExpertRanking r;
    r.query = test::make_query("q1", "carbon flux data");
    for (std::size_t i = 0; i < grades.size(); ++i) {
        corpus::JudgedItem judged;
        judged.item = test::make_item("itm-" + std::to_string(i), "carbon flux summary text");
        judged.relevance = grades[i];
        r.judged.push_back(judged);
    }
    return r;
}

}  // namespace

TEST_SUITE("corpus") {

TEST_CASE("94-ranking fixture loads with full counts") {
    const auto data = corpus::load_dataset(test::fixture_path("rankings_94.jsonl"));
    CHECK(data.size() == 94);
    CHECK(corpus::count_pointwise_examples(data) == 940);

    std::size_t pairs = 0;
    for (const auto& r : data) pairs += corpus::build_preference_pairs(r).size();
    CHECK(pairs == 2350);
}

TEST_CASE("empty file loads to an empty list") {
    const auto dir = test::temp_dir("corpus_empty");
    const auto path = (dir / "empty.jsonl").string();
    io::atomic_write(path, "");
    CHECK(corpus::load_dataset(path).empty());
    CHECK(corpus::count_pointwise_examples({}) == 0);
}

TEST_CASE("relevance out of range is rejected with the line") {
    const auto dir = test::temp_dir("corpus_range");
    const auto path = (dir / "bad.jsonl").string();
    std::string good =
        R"({"query_id":"q1","query_text":"carbon","items":[{"item_id":"a","url":"u","summary":"carbon data","relevance":3}]})";
    std::string bad =
        R"({"query_id":"q2","query_text":"flux","items":[{"item_id":"b","url":"u","summary":"flux data","relevance":12}]})";
    io::atomic_write(path, good + "\n" + bad + "\n");
    CHECK_THROWS_AS(corpus::load_dataset(path), ValidationError);
    try {
        corpus::load_dataset(path);
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("malformed JSON reports its line number") {
    const auto dir = test::temp_dir("corpus_parse");
    const auto path = (dir / "bad.jsonl").string();
    io::atomic_write(path, "{not json\n");
    CHECK_THROWS_AS(corpus::load_dataset(path), ParseError);
    try {
        corpus::load_dataset(path);
    } catch (const ParseError& e) {
        CHECK(e.line() == 1);
    }
}

TEST_CASE("load preserves input order") {
    const auto data = corpus::load_dataset(test::fixture_path("rankings_10.jsonl"));
    REQUIRE(data.size() == 10);
    CHECK(data.front().query.id == "demo01");
    CHECK(data.back().query.id == "demo10");
    CHECK(data.front().query.text == "Aerosol Concentration dataset");
    for (const auto& r : data) {
        for (const auto& judged : r.judged) {
            CHECK(judged.item.tokens == retrieval::tokenize(judged.item.summary));
        }
    }
}

TEST_CASE("split sizes follow 80:10:10 with remainder to train") {
    const auto data = corpus::load_dataset(test::fixture_path("rankings_94.jsonl"));
    const auto split = corpus::split_dataset(data, 7);
    CHECK(split.train.size() == 76);
    CHECK(split.validation.size() == 9);
    CHECK(split.test.size() == 9);

    const auto ten = corpus::load_dataset(test::fixture_path("rankings_10.jsonl"));
    const auto split10 = corpus::split_dataset(ten, 7);
    CHECK(split10.train.size() == 8);
    CHECK(split10.validation.size() == 1);
    CHECK(split10.test.size() == 1);
}

TEST_CASE("split is a deterministic partition") {
    const auto data = corpus::load_dataset(test::fixture_path("rankings_94.jsonl"));
    const auto a = corpus::split_dataset(data, 42);
    const auto b = corpus::split_dataset(data, 42);

    auto ids = [](const std::vector<corpus::ExpertRanking>& rs) {
        std::vector<std::string> out;
        for (const auto& r : rs) out.push_back(r.query.id);
        return out;
    };
    CHECK(ids(a.train) == ids(b.train));
    CHECK(ids(a.validation) == ids(b.validation));
    CHECK(ids(a.test) == ids(b.test));

    // disjoint and exhaustive
    std::set<std::string> seen;
    for (const auto* part : {&a.train, &a.validation, &a.test}) {
        for (const auto& r : *part) CHECK(seen.insert(r.query.id).second);
    }
    CHECK(seen.size() == data.size());

    const auto c = corpus::split_dataset(data, 43);
    CHECK(ids(a.train) != ids(c.train));  // seed actually matters
}

TEST_CASE("split rejects empty input") {
    CHECK_THROWS_AS(corpus::split_dataset({}, 1), ValidationError);
}

TEST_CASE("preference pairs: 10 distinct grades give exactly 25") {
    const auto r = ranking_with_grades({0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
    const auto pairs = corpus::build_preference_pairs(r);
    CHECK(pairs.size() == 25);
    for (const auto& pair : pairs) {
        CHECK(pair.positive.id != pair.negative.id);
    }
}

TEST_CASE("preference pairs: positive strictly outranks negative") {
    const auto r = ranking_with_grades({3, 9, 0, 7, 5, 5, 2, 8, 1, 6});
    std::map<std::string, int> rel;
    for (const auto& judged : r.judged) rel[judged.item.id] = judged.relevance;
    for (const auto& pair : corpus::build_preference_pairs(r)) {
        CHECK(rel[pair.positive.id] > rel[pair.negative.id]);
    }
}

TEST_CASE("preference pairs: boundary ties are dropped") {
    // grades sorted desc: 9 8 7 6 5 | 5 4 3 2 1 -- the 5/5 pair is skipped
    const auto r = ranking_with_grades({9, 8, 7, 6, 5, 5, 4, 3, 2, 1});
    CHECK(corpus::build_preference_pairs(r).size() == 24);
}

TEST_CASE("preference pairs: two items, odd counts, degenerate sizes") {
    CHECK(corpus::build_preference_pairs(ranking_with_grades({2, 7})).size() == 1);
    const auto pair = corpus::build_preference_pairs(ranking_with_grades({2, 7})).front();
    CHECK(pair.positive.id == "itm-1");  // grade 7 side

    // ceil(m/2) x floor(m/2) for odd m
    CHECK(corpus::build_preference_pairs(ranking_with_grades({1, 2, 3, 4, 5})).size() == 6);
    CHECK_THROWS_AS(corpus::build_preference_pairs(ranking_with_grades({4})), ValidationError);
}

TEST_CASE("pair count property: ceil(m/2)*floor(m/2) for distinct grades") {
    for (std::size_t m = 2; m <= 10; ++m) {
        std::vector<int> grades;
        for (std::size_t i = 0; i < m; ++i) grades.push_back(static_cast<int>(i));
        const auto pairs = corpus::build_preference_pairs(ranking_with_grades(grades));
        CHECK(pairs.size() == ((m + 1) / 2) * (m / 2));
    }
}

TEST_CASE("pair order is deterministic, positive-major") {
    const auto r = ranking_with_grades({0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
    const auto a = corpus::build_preference_pairs(r);
    const auto b = corpus::build_preference_pairs(r);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].positive.id == b[i].positive.id);
        CHECK(a[i].negative.id == b[i].negative.id);
    }
    // first block shares the top positive (grade 9 lives at index 9)
    for (std::size_t i = 0; i < 5; ++i) CHECK(a[i].positive.id == "itm-9");
}

TEST_CASE("dataset lines round-trip") {
    const auto data = corpus::load_dataset(test::fixture_path("rankings_10.jsonl"));
    const auto dir = test::temp_dir("corpus_roundtrip");
    std::string text;
    for (const auto& r : data) text += corpus::to_dataset_line(r) + "\n";
    const auto path = (dir / "roundtrip.jsonl").string();
    io::atomic_write(path, text);
    const auto again = corpus::load_dataset(path);
    REQUIRE(again.size() == data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        CHECK(again[i].query.id == data[i].query.id);
        CHECK(again[i].judged.size() == data[i].judged.size());
        for (std::size_t k = 0; k < data[i].judged.size(); ++k) {
            CHECK(again[i].judged[k].item.summary == data[i].judged[k].item.summary);
            CHECK(again[i].judged[k].relevance == data[i].judged[k].relevance);
        }
    }
}

}  // TEST_SUITE
