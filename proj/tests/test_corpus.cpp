#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "pergen/corpus.hpp"

using namespace pergen;
using testutil::make_doc;
using testutil::to_record;

namespace {
std::vector<RawRecord> records_of(const std::vector<Document>& docs) {
    std::vector<RawRecord> out;
    for (const auto& d : docs) out.push_back(to_record(d));
    return out;
}
}  // namespace

TEST_CASE("ingest deduplicates identical (title, body) per user") {
    std::vector<RawRecord> records = {
        to_record(make_doc("u1", "d1", 10, "same body", "same title")),
        to_record(make_doc("u1", "d2", 20, "same body", "same title")),
    };
    IngestStats stats;
    Corpus c = ingest_documents(records, &stats);
    REQUIRE(c.documents.size() == 1);
    CHECK(c.documents[0].doc_id == "d1");  // earliest kept
    CHECK(stats.removed_duplicates == 1);

    // Same body under a different user is not a duplicate.
    records.push_back(to_record(make_doc("u2", "d3", 5, "same body", "same title")));
    CHECK(ingest_documents(records).documents.size() == 2);
}

TEST_CASE("ingest trivial cases") {
    CHECK(ingest_documents({}).documents.empty());
    CHECK(ingest_documents({}).num_users() == 0);

    std::vector<RawRecord> records;
    for (int u = 0; u < 3; ++u)
        for (int d = 0; d < 4; ++d)
            records.push_back(to_record(make_doc("user" + std::to_string(u),
                                                 "doc" + std::to_string(u * 4 + d), d,
                                                 "body " + std::to_string(u * 4 + d))));
    Corpus c = ingest_documents(records);
    CHECK(c.documents.size() == 12);
    REQUIRE(c.num_users() == 3);
    for (const auto& [user, ids] : c.per_user) CHECK(ids.size() == 4);
}

TEST_CASE("ingest rejects duplicate doc_id and skips empty bodies") {
    std::vector<RawRecord> dup = {to_record(make_doc("u1", "d1", 1, "a")),
                                  to_record(make_doc("u2", "d1", 2, "b"))};
    CHECK_THROWS_WITH(ingest_documents(dup), Catch::Matchers::ContainsSubstring("d1"));

    std::vector<RawRecord> with_empty = {to_record(make_doc("u1", "d1", 1, "a")),
                                         to_record(make_doc("u1", "d2", 2, ""))};
    IngestStats stats;
    Corpus c = ingest_documents(with_empty, &stats);
    CHECK(c.documents.size() == 1);
    CHECK(stats.skipped_empty_body == 1);
}

TEST_CASE("ingest is invariant under record permutation and idempotent") {
    Rng rng(3);
    auto vocab = testutil::default_vocab();
    std::vector<RawRecord> records;
    for (int u = 0; u < 4; ++u)
        for (int d = 0; d < 6; ++d)
            records.push_back(to_record(
                make_doc("u" + std::to_string(u), "d" + std::to_string(u * 6 + d),
                         static_cast<std::int64_t>(rand_below(rng, 5)),
                         testutil::random_text(rng, 12, vocab))));
    Corpus base = ingest_documents(records);

    auto shuffled = records;
    shuffle_deterministic(shuffled, rng);
    Corpus permuted = ingest_documents(shuffled);
    REQUIRE(permuted.documents.size() == base.documents.size());
    for (std::size_t i = 0; i < base.documents.size(); ++i)
        CHECK(permuted.documents[i].doc_id == base.documents[i].doc_id);
    CHECK(permuted.per_user == base.per_user);

    // Re-ingesting the canonical output reproduces the corpus exactly.
    Corpus again = ingest_documents(records_of(base.documents));
    REQUIRE(again.documents.size() == base.documents.size());
    for (std::size_t i = 0; i < base.documents.size(); ++i) {
        CHECK(again.documents[i].doc_id == base.documents[i].doc_id);
        CHECK(again.documents[i].full_text() == base.documents[i].full_text());
    }
}

TEST_CASE("full_text joins title and body with a newline") {
    CHECK(make_doc("u", "d", 0, "body").full_text() == "body");
    CHECK(make_doc("u", "d", 0, "body", "title").full_text() == "title\nbody");
}

TEST_CASE("immediate_context takes the first k scalars") {
    auto doc400 = make_doc("u", "d", 0, std::string(400, 'x'));
    CHECK(immediate_context(doc400, 150) == std::string(150, 'x'));
    auto doc40 = make_doc("u", "d", 0, std::string(40, 'y'));
    CHECK(immediate_context(doc40, 150) == std::string(40, 'y'));
    CHECK(immediate_context(make_doc("u", "d", 0, "abc"), 1) == "a");
    CHECK(immediate_context(make_doc("u", "d", 0, "body"), 150) == "body");
    CHECK_THROWS(immediate_context(make_doc("u", "d", 0, "abc"), 0));
}

TEST_CASE("qualify_examples applies the qualification predicate") {
    SECTION("single-document user yields nothing") {
        Corpus c = ingest_documents({to_record(make_doc("u1", "d1", 1, std::string(500, 'a')))});
        CHECK(qualify_examples(c).empty());
    }
    SECTION("7 long docs qualify docs 3..7, user kept") {
        std::vector<RawRecord> records;
        for (int i = 0; i < 7; ++i)
            records.push_back(to_record(make_doc(
                "u1", "d" + std::to_string(i), i,
                std::string(500, static_cast<char>('a' + i)))));
        auto examples = qualify_examples(ingest_documents(records));
        REQUIRE(examples.size() == 5);
        CHECK(examples[0].current_doc_id == "d2");
        CHECK(examples[0].past_doc_ids == std::vector<std::string>{"d0", "d1"});
        CHECK(examples[4].current_doc_id == "d6");
        CHECK(examples[4].past_doc_ids.size() == 6);
        for (const auto& ex : examples) {
            CHECK(ex.ground_truth.size() == 500);
            CHECK(ex.immediate_context == ex.ground_truth.substr(0, 150));
        }
    }
    SECTION("short documents and thin users are filtered") {
        std::vector<RawRecord> records;
        for (int i = 0; i < 7; ++i)
            records.push_back(to_record(make_doc("u1", "d" + std::to_string(i), i,
                                                 std::string(299, 'a') + std::to_string(i))));
        // exactly 300 scalars is not *longer than* 300.
        CHECK(qualify_examples(ingest_documents(records)).empty());
    }
    SECTION("per-user cap keeps the chronologically latest 50") {
        std::vector<RawRecord> records;
        for (int i = 0; i < 62; ++i)
            records.push_back(to_record(make_doc(
                "u1", "d" + std::to_string(100 + i), i, std::string(400, 'a') + std::to_string(i))));
        auto examples = qualify_examples(ingest_documents(records));
        REQUIRE(examples.size() == 50);  // 60 qualify, latest 50 kept
        CHECK(examples.front().current_doc_id == "d112");
        CHECK(examples.back().current_doc_id == "d161");
    }
}

TEST_CASE("qualify_examples is invariant under document order permutation") {
    Rng rng(17);
    std::vector<RawRecord> records;
    for (int u = 0; u < 3; ++u)
        for (int d = 0; d < 9; ++d)
            records.push_back(to_record(make_doc(
                "u" + std::to_string(u), "d" + std::to_string(u * 9 + d), d % 4,
                std::string(350 + d, 'k'))));
    auto base = qualify_examples(ingest_documents(records));
    shuffle_deterministic(records, rng);
    auto permuted = qualify_examples(ingest_documents(records));
    REQUIRE(base.size() == permuted.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
        CHECK(base[i].current_doc_id == permuted[i].current_doc_id);
        CHECK(base[i].past_doc_ids == permuted[i].past_doc_ids);
    }
}

TEST_CASE("split_by_user rounds deterministically and stays disjoint") {
    auto users = [](int n) {
        std::set<std::string> out;
        for (int i = 0; i < n; ++i) out.insert("user" + std::to_string(i));
        return out;
    };
    SECTION("100 users -> 85/5/10") {
        UserSplit s = split_by_user(users(100), 42);
        CHECK(s.train_users.size() == 85);
        CHECK(s.validation_users.size() == 5);
        CHECK(s.test_users.size() == 10);
    }
    SECTION("20 users -> 17/1/2") {
        UserSplit s = split_by_user(users(20), 42);
        CHECK(s.train_users.size() == 17);
        CHECK(s.validation_users.size() == 1);
        CHECK(s.test_users.size() == 2);
    }
    SECTION("same seed twice -> identical; different seed -> moved users allowed") {
        UserSplit a = split_by_user(users(50), 7);
        UserSplit b = split_by_user(users(50), 7);
        CHECK(a.train_users == b.train_users);
        CHECK(a.validation_users == b.validation_users);
        CHECK(a.test_users == b.test_users);
    }
    SECTION("partitions are pairwise disjoint and cover all users") {
        auto all = users(37);
        UserSplit s = split_by_user(all, 99);
        std::set<std::string> seen;
        for (const auto& u : s.train_users) CHECK(seen.insert(u).second);
        for (const auto& u : s.validation_users) CHECK(seen.insert(u).second);
        for (const auto& u : s.test_users) CHECK(seen.insert(u).second);
        CHECK(seen == all);
    }
    SECTION("fewer than 3 users is an error") {
        CHECK_THROWS(split_by_user(users(2), 1));
    }
    SECTION("ratios must sum to 1") {
        CHECK_THROWS(split_by_user(users(10), 1, SplitRatios{0.5, 0.3, 0.1}));
    }
}

TEST_CASE("partition_train_halves splits users near-evenly") {
    auto examples_for = [](int n_users, int per_user) {
        std::vector<GenerationExample> out;
        for (int u = 0; u < n_users; ++u)
            for (int e = 0; e < per_user; ++e) {
                GenerationExample ex;
                ex.user_id = "u" + std::to_string(u);
                ex.current_doc_id = "d" + std::to_string(u * 100 + e);
                out.push_back(ex);
            }
        return out;
    };
    SECTION("10 users -> 5 + 5") {
        auto [a, b] = partition_train_halves(examples_for(10, 3), 5);
        std::set<std::string> ua, ub;
        for (const auto& ex : a) ua.insert(ex.user_id);
        for (const auto& ex : b) ub.insert(ex.user_id);
        CHECK(ua.size() == 5);
        CHECK(ub.size() == 5);
        CHECK(a.size() + b.size() == 30);
        for (const auto& u : ua) CHECK(ub.count(u) == 0);
    }
    SECTION("1 user -> 1 + 0") {
        auto [a, b] = partition_train_halves(examples_for(1, 4), 5);
        CHECK(a.size() == 4);
        CHECK(b.empty());
    }
    SECTION("empty input -> two empty halves") {
        auto [a, b] = partition_train_halves({}, 5);
        CHECK(a.empty());
        CHECK(b.empty());
    }
    SECTION("same seed twice-> identical halves") {
        auto h1 = partition_train_halves(examples_for(7, 2), 11);
        auto h2 = partition_train_halves(examples_for(7, 2), 11);
        REQUIRE(h1.first.size() == h2.first.size());
        for (std::size_t i = 0; i < h1.first.size(); ++i)
            CHECK(h1.first[i].current_doc_id == h2.first[i].current_doc_id);
    }
}
