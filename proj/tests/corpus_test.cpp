#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "ghl/bluetooth_id.hpp"
#include "ghl/chunker.hpp"
#include "ghl/corpus.hpp"
#include "ghl/errors.hpp"
#include "ghl/util.hpp"

namespace fs = std::filesystem;
using Catch::Matchers::ContainsSubstring;

namespace {

fs::path fixture_dir() { return fs::path(GHL_FIXTURE_DIR); }

fs::path make_temp_dir() {
    auto dir = fs::temp_directory_path() /
               ("ghl_corpus_" + std::to_string(std::random_device{}()));
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& p, const std::string& body) {
    std::ofstream out(p, std::ios::binary);
    out << body;
}

}  // namespace

TEST_CASE("sha256_hex matches published vectors") {
    CHECK(ghl::sha256_hex("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(ghl::sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(ghl::sha256_hex("abc") == ghl::sha256_hex("abc"));
    CHECK(ghl::sha256_hex("abd") != ghl::sha256_hex("abc"));
}

TEST_CASE("string helpers") {
    CHECK(ghl::trim("  a b \t\n") == "a b");
    CHECK(ghl::trim("") == "");
    CHECK(ghl::trim(" \r\n ") == "");
    CHECK(ghl::to_lower("AbC-12") == "abc-12");
    CHECK(ghl::collapse_whitespace("  several\t\twords \n here  ") == "several words here");
    CHECK(ghl::collapse_whitespace("") == "");

    auto lines = ghl::split_lines("one\r\ntwo\nthree");
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "one");
    CHECK(lines[1] == "two");
    CHECK(lines[2] == "three");
    CHECK(ghl::split_lines("a\n").back().empty());

    CHECK(ghl::word_count("") == 0);
    CHECK(ghl::word_count("  one   two\nthree ") == 3);
    auto spans = ghl::word_spans(" ab  cd");
    REQUIRE(spans.size() == 2);
    CHECK(spans[0].begin == 1);
    CHECK(spans[0].end == 3);
    CHECK(spans[1].begin == 5);
    CHECK(spans[1].end == 7);
}

TEST_CASE("round_half_up rounds halves toward positive infinity") {
    CHECK(ghl::round_half_up(0.65, 1) == Catch::Approx(0.7).margin(1e-12));
    CHECK(ghl::round_half_up(0.651, 1) == Catch::Approx(0.7).margin(1e-12));
    CHECK(ghl::round_half_up(0.649, 1) == Catch::Approx(0.6).margin(1e-12));
    CHECK(ghl::round_half_up(0.64, 1) == Catch::Approx(0.6).margin(1e-12));
    CHECK(ghl::round_half_up(2.5, 0) == Catch::Approx(3.0).margin(1e-12));
    CHECK(ghl::round_half_up(0.7288, 2) == Catch::Approx(0.73).margin(1e-12));
    CHECK(ghl::round_half_up(0.0, 1) == 0.0);
}

TEST_CASE("format helpers") {
    CHECK(ghl::format_fixed(0.7288135, 2) == "0.73");
    CHECK(ghl::format_fixed(0.5, 2) == "0.50");
    CHECK(ghl::format_fixed(1.0 / 3.0, 2) == "0.33");
    CHECK(ghl::format_hms(0) == "0:00:00");
    CHECK(ghl::format_hms(1210) == "0:20:10");
    CHECK(ghl::format_hms(3661) == "1:01:01");
    CHECK(ghl::format_hms(59.4) == "0:00:59");
    CHECK(ghl::format_hms(-3) == "0:00:00");
}

TEST_CASE("bluetooth id parses the structured notation") {
    auto id = ghl::parse_bluetooth_id("AVRCP/CT/CON/BV-01-C");
    CHECK(id.spec == "AVRCP");
    CHECK(id.iut_role == "CT");
    REQUIRE(id.segments.size() == 1);
    CHECK(id.segments[0] == "CON");
    CHECK(id.behavior == ghl::BluetoothTestCaseId::Behavior::BV);
    CHECK(id.nn == 1);
    CHECK(id.y == 'C');
    CHECK(ghl::format_bluetooth_id(id) == "AVRCP/CT/CON/BV-01-C");

    auto bi = ghl::parse_bluetooth_id("A2DP/SNK/AS/BI-12-I");
    CHECK(bi.behavior == ghl::BluetoothTestCaseId::Behavior::BI);
    CHECK(bi.nn == 12);
    CHECK(bi.y == 'I');

    auto deep = ghl::parse_bluetooth_id("GAP/BR/SEC/SEM/AUT/P2/X/BV-99-C");
    CHECK(deep.segments.size() == 5);
    CHECK(ghl::format_bluetooth_id(deep) == "GAP/BR/SEC/SEM/AUT/P2/X/BV-99-C");
}

TEST_CASE("bluetooth id rejects malformed input") {
    const std::vector<std::string> bad = {
        "",
        "AVRCP/CT/CON",                     // no tail
        "AVRCP/CT/CON/BX-01-C",             // unknown behavior code
        "AVRCP/CT/CON/bv-01-C",             // lowercase code
        "AVRCP/CT/CON/BV-1-C",              // nn not two digits
        "AVRCP/CT/CON/BV-001-C",            // nn too long
        "AVRCP/CT/CON/BV-01-",              // missing y
        "AVRCP/CT/CON/BV-01-CC",            // y too long
        "AVRCP/CT/BV-01-C",                 // no middle segment
        "S/R/a/b/c/d/e/f/BV-01-C",          // six middle segments
        "AVRCP//CON/BV-01-C",               // empty segment
        "AVRCP/C T/CON/BV-01-C",            // whitespace in segment
    };
    for (const auto& text : bad) {
        INFO("input: \"" << text << "\"");
        CHECK_THROWS_AS(ghl::parse_bluetooth_id(text), ghl::CorpusError);
        CHECK_FALSE(ghl::try_parse_bluetooth_id(text).has_value());
    }
    CHECK(ghl::try_parse_bluetooth_id("HFP/AG/SLC/BV-02-I").has_value());
}

TEST_CASE("bluetooth id round-trips randomly generated ids") {
    std::mt19937 rng(20260814);
    auto seg = [&](std::size_t max_len) {
        static const char alphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
        std::uniform_int_distribution<std::size_t> len(1, max_len);
        std::uniform_int_distribution<std::size_t> pick(0, sizeof(alphabet) - 2);
        std::string s;
        for (std::size_t i = 0, n = len(rng); i < n; ++i) s.push_back(alphabet[pick(rng)]);
        return s;
    };
    for (int i = 0; i < 300; ++i) {
        ghl::BluetoothTestCaseId id;
        id.spec = seg(6);
        id.iut_role = seg(4);
        std::uniform_int_distribution<std::size_t> nseg(1, 5);
        for (std::size_t k = 0, n = nseg(rng); k < n; ++k) id.segments.push_back(seg(5));
        id.behavior = (i % 2 == 0) ? ghl::BluetoothTestCaseId::Behavior::BV
                                   : ghl::BluetoothTestCaseId::Behavior::BI;
        id.nn = std::uniform_int_distribution<int>(0, 99)(rng);
        id.y = "CIX"[i % 3];
        auto text = ghl::format_bluetooth_id(id);
        auto back = ghl::parse_bluetooth_id(text);
        REQUIRE(back == id);
    }
}

TEST_CASE("manifest loads the bundled fixture dataset") {
    auto manifest = ghl::load_manifest(fixture_dir() / "minicorp" / "manifest.json");
    CHECK(manifest.dataset_name == "minicorp");
    REQUIRE(manifest.functions.size() == 2);

    const auto& pw = manifest.functions[0];
    CHECK(pw.function_key == "passwords");
    CHECK(pw.id_scheme == ghl::IdScheme::freetext);
    REQUIRE(pw.requirement_paths.size() == 1);
    CHECK(fs::exists(pw.requirement_paths[0]));
    CHECK(fs::exists(pw.truth_path));
    REQUIRE(pw.strategy_path.has_value());
    CHECK(fs::exists(*pw.strategy_path));

    const auto& rc = manifest.functions[1];
    CHECK(rc.function_key == "remotecontrol");
    CHECK(rc.id_scheme == ghl::IdScheme::bluetooth);
    CHECK_FALSE(rc.strategy_path.has_value());
}

TEST_CASE("manifest validation names the offending field") {
    auto dir = make_temp_dir();
    write_file(dir / "truth.txt", "one case\n");
    write_file(dir / "req.md", "# Doc\n\nbody text\n");

    SECTION("missing file") {
        CHECK_THROWS_WITH(ghl::load_manifest(dir / "nope.json"),
                          ContainsSubstring("manifest not found"));
    }
    SECTION("invalid json") {
        write_file(dir / "m.json", "{not json");
        CHECK_THROWS_WITH(ghl::load_manifest(dir / "m.json"),
                          ContainsSubstring("not valid JSON"));
    }
    SECTION("no functions") {
        write_file(dir / "m.json", R"({"dataset_name":"d","functions":[]})");
        CHECK_THROWS_WITH(ghl::load_manifest(dir / "m.json"),
                          ContainsSubstring("no functions"));
    }
    SECTION("duplicate function key") {
        write_file(dir / "m.json", R"({"dataset_name":"d","functions":[
            {"function_key":"f","requirement_paths":["req.md"],"truth_path":"truth.txt","id_scheme":"freetext"},
            {"function_key":"f","requirement_paths":["req.md"],"truth_path":"truth.txt","id_scheme":"freetext"}]})");
        CHECK_THROWS_WITH(ghl::load_manifest(dir / "m.json"),
                          ContainsSubstring("duplicate function_key \"f\""));
    }
    SECTION("dangling truth path") {
        write_file(dir / "m.json", R"({"dataset_name":"d","functions":[
            {"function_key":"f","requirement_paths":["req.md"],"truth_path":"gone.txt","id_scheme":"freetext"}]})");
        CHECK_THROWS_WITH(ghl::load_manifest(dir / "m.json"),
                          ContainsSubstring("truth_path"));
    }
    SECTION("unknown id scheme") {
        write_file(dir / "m.json", R"({"dataset_name":"d","functions":[
            {"function_key":"f","requirement_paths":["req.md"],"truth_path":"truth.txt","id_scheme":"guid"}]})");
        CHECK_THROWS_WITH(ghl::load_manifest(dir / "m.json"),
                          ContainsSubstring("unknown id_scheme"));
    }
    SECTION("empty requirement list") {
        write_file(dir / "m.json", R"({"dataset_name":"d","functions":[
            {"function_key":"f","requirement_paths":[],"truth_path":"truth.txt","id_scheme":"freetext"}]})");
        CHECK_THROWS_WITH(ghl::load_manifest(dir / "m.json"),
                          ContainsSubstring("requirement_paths"));
    }
    fs::remove_all(dir);
}

TEST_CASE("requirement ingestion detects sections") {
    SECTION("markdown and numbered headings") {
        std::string body =
            "intro paragraph before any heading\n"
            "# Title\n"
            "alpha beta\n"
            "## 1. First\n"
            "gamma\n"
            "2.3 Deep numbered heading\n"
            "delta epsilon\n";
        auto doc = ghl::ingest_requirement_text(body, "fn");
        CHECK(doc.body == body);
        CHECK(doc.word_count == ghl::word_count(body));
        REQUIRE(doc.sections.size() == 4);
        CHECK(doc.sections[0].heading.empty());
        CHECK(doc.sections[0].begin == 0);
        CHECK(doc.sections[1].heading == "Title");
        CHECK(doc.sections[2].heading == "1. First");
        CHECK(doc.sections[3].heading == "Deep numbered heading");
        for (std::size_t i = 1; i < doc.sections.size(); ++i)
            CHECK(doc.sections[i].begin == doc.sections[i - 1].end);
        CHECK(doc.sections.back().end == body.size());
    }
    SECTION("crlf line endings keep byte offsets") {
        std::string body = "# One\r\ntext here\r\n## Two\r\nmore\r\n";
        auto doc = ghl::ingest_requirement_text(body, "fn");
        REQUIRE(doc.sections.size() == 2);
        CHECK(doc.sections[0].heading == "One");
        CHECK(doc.sections[1].heading == "Two");
        CHECK(body.compare(doc.sections[1].begin, 5, "## Tw") == 0);
        CHECK(doc.sections[1].end == body.size());
    }
    SECTION("document without headings becomes one section") {
        auto doc = ghl::ingest_requirement_text("just some plain text\nwith two lines\n", "fn");
        REQUIRE(doc.sections.size() == 1);
        CHECK(doc.sections[0].heading.empty());
        CHECK(doc.sections[0].begin == 0);
        CHECK(doc.sections[0].end == doc.body.size());
    }
    SECTION("plain sentence starting with a number is not a heading") {
        auto doc = ghl::ingest_requirement_text("no heading\n7 is not followed by a dot heading\n",
                                                "fn");
        CHECK(doc.sections.size() == 1);
    }
    SECTION("empty document rejected") {
        CHECK_THROWS_AS(ghl::ingest_requirement_text("  \n \n", "fn"), ghl::CorpusError);
    }
}

TEST_CASE("truth ingestion, freetext scheme") {
    SECTION("tab separates key and description") {
        auto cases = ghl::ingest_truth_cases_text(
            "K1\tVerify the first thing.\nK2\tVerify the second thing.\n",
            ghl::IdScheme::freetext, "fn");
        REQUIRE(cases.size() == 2);
        CHECK(cases[0].case_key == "K1");
        CHECK(cases[0].description == "Verify the first thing.");
        CHECK(cases[0].function_key == "fn");
        CHECK_FALSE(cases[0].structured_id.has_value());
    }
    SECTION("bare lines double as keys") {
        auto cases = ghl::ingest_truth_cases_text("Check the lamp turns on.\n\n  \n",
                                                  ghl::IdScheme::freetext, "fn");
        REQUIRE(cases.size() == 1);
        CHECK(cases[0].case_key == cases[0].description);
    }
    SECTION("duplicate keys rejected with line number") {
        CHECK_THROWS_WITH(
            ghl::ingest_truth_cases_text("same\nother\nsame\n", ghl::IdScheme::freetext, "fn"),
            ContainsSubstring("line 3"));
    }
}

TEST_CASE("truth ingestion, bluetooth scheme") {
    auto cases = ghl::ingest_truth_cases_text(
        "AVRCP/CT/CON/BV-01-C\n  AVRCP/TG/MPS/BI-01-C  \n", ghl::IdScheme::bluetooth, "fn");
    REQUIRE(cases.size() == 2);
    CHECK(cases[0].case_key == "AVRCP/CT/CON/BV-01-C");
    REQUIRE(cases[1].structured_id.has_value());
    CHECK(cases[1].structured_id->behavior == ghl::BluetoothTestCaseId::Behavior::BI);

    CHECK_THROWS_WITH(ghl::ingest_truth_cases_text("AVRCP/CT/CON/BV-01-C\nnot an id\n",
                                                   ghl::IdScheme::bluetooth, "fn"),
                      ContainsSubstring("line 2"));
    CHECK_THROWS_WITH(
        ghl::ingest_truth_cases_text("AVRCP/CT/CON/BV-01-C\nAVRCP/CT/CON/BV-01-C\n",
                                     ghl::IdScheme::bluetooth, "fn"),
        ContainsSubstring("duplicate"));
}

TEST_CASE("truth files of the fixture dataset ingest cleanly") {
    auto manifest = ghl::load_manifest(fixture_dir() / "minicorp" / "manifest.json");
    auto pw = ghl::ingest_truth_cases(manifest.functions[0].truth_path,
                                      manifest.functions[0].id_scheme, "passwords");
    CHECK(pw.size() == 4);
    auto rc = ghl::ingest_truth_cases(manifest.functions[1].truth_path,
                                      manifest.functions[1].id_scheme, "remotecontrol");
    CHECK(rc.size() == 3);
    for (const auto& tc : rc) CHECK(tc.structured_id.has_value());
}

namespace {

std::string synthetic_document(std::size_t sections, std::size_t words_per_section,
                               unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> wlen(2, 9);
    std::string body;
    for (std::size_t s = 0; s < sections; ++s) {
        body += "## " + std::to_string(s + 1) + ". Topic " + std::to_string(s + 1) + "\n";
        std::size_t emitted = 0;
        while (emitted < words_per_section) {
            std::string word(static_cast<std::size_t>(wlen(rng)), 'x');
            word[0] = static_cast<char>('a' + (rng() % 26));
            body += word;
            ++emitted;
            if (emitted % 12 == 0)
                body += "\n";
            else
                body += " ";
            if (emitted % 60 == 0) body += "\n";
        }
        body += "\n\n";
    }
    return body;
}

void check_chunk_invariants(const ghl::RequirementDocument& doc,
                            const std::vector<ghl::DocumentChunk>& chunks, std::size_t max_words,
                            std::size_t overlap_words) {
    REQUIRE_FALSE(chunks.empty());
    const auto spans = ghl::word_spans(doc.body);
    auto char_begin = [&](std::size_t w) {
        return w < spans.size() ? spans[w].begin : doc.body.size();
    };

    CHECK(chunks.front().word_begin == 0);
    CHECK(chunks.back().word_end == spans.size());

    std::string rebuilt;
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        const auto& c = chunks[i];
        INFO("chunk " << i);
        CHECK(c.index == i);
        CHECK(c.word_end > c.word_begin);
        CHECK(c.word_end - c.word_begin <= max_words);

        std::size_t from = (i == 0) ? 0 : char_begin(c.word_begin);
        std::size_t to = (i + 1 == chunks.size()) ? doc.body.size() : char_begin(c.word_end);
        REQUIRE(c.body == doc.body.substr(from, to - from));

        if (i > 0) {
            const auto& prev = chunks[i - 1];
            std::size_t expected_overlap =
                std::min(overlap_words, prev.word_end - prev.word_begin);
            CHECK(prev.word_end - c.word_begin == expected_overlap);
            std::size_t fresh = char_begin(prev.word_end) - char_begin(c.word_begin);
            rebuilt += c.body.substr(fresh);
        } else {
            rebuilt += c.body;
        }
    }
    REQUIRE(rebuilt == doc.body);
}

}  // namespace

TEST_CASE("chunker splits long documents and preserves the body") {
    SECTION("short document stays in one chunk") {
        auto doc = ghl::ingest_requirement_text("# T\nonly a few words here\n", "fn");
        auto chunks = ghl::chunk_document(doc, 100, 10);
        REQUIRE(chunks.size() == 1);
        CHECK(chunks[0].body == doc.body);
        CHECK(chunks[0].word_begin == 0);
        CHECK(chunks[0].word_end == doc.word_count);
    }
    SECTION("sectioned document") {
        auto doc = ghl::ingest_requirement_text(synthetic_document(12, 70, 11), "fn");
        auto chunks = ghl::chunk_document(doc, 160, 25);
        CHECK(chunks.size() > 3);
        check_chunk_invariants(doc, chunks, 160, 25);
    }
    SECTION("single huge paragraph falls back to hard splits") {
        std::string body;
        for (int i = 0; i < 900; ++i) body += "w" + std::to_string(i) + " ";
        auto doc = ghl::ingest_requirement_text(body, "fn");
        auto chunks = ghl::chunk_document(doc, 128, 16);
        CHECK(chunks.size() >= 7);
        check_chunk_invariants(doc, chunks, 128, 16);
        for (std::size_t i = 0; i + 1 < chunks.size(); ++i)
            CHECK(chunks[i].word_end - chunks[i].word_begin == 128);
    }
    SECTION("zero overlap") {
        auto doc = ghl::ingest_requirement_text(synthetic_document(6, 50, 3), "fn");
        auto chunks = ghl::chunk_document(doc, 90, 0);
        check_chunk_invariants(doc, chunks, 90, 0);
    }
    SECTION("randomized parameter sweep") {
        std::mt19937 rng(99);
        for (int trial = 0; trial < 25; ++trial) {
            auto doc = ghl::ingest_requirement_text(
                synthetic_document(2 + trial % 9, 30 + (trial * 17) % 120,
                                   static_cast<unsigned>(trial)),
                "fn");
            std::size_t max_words = 40 + rng() % 200;
            std::size_t overlap = rng() % (max_words / 2);
            INFO("trial " << trial << " max=" << max_words << " overlap=" << overlap);
            check_chunk_invariants(doc, ghl::chunk_document(doc, max_words, overlap), max_words,
                                   overlap);
        }
    }
    SECTION("invalid parameters") {
        auto doc = ghl::ingest_requirement_text("some words\n", "fn");
        CHECK_THROWS_AS(ghl::chunk_document(doc, 0, 0), ghl::PipelineError);
        CHECK_THROWS_AS(ghl::chunk_document(doc, 10, 10), ghl::PipelineError);
        CHECK_THROWS_AS(ghl::chunk_document(doc, 10, 11), ghl::PipelineError);
    }
}

TEST_CASE("strategy ingestion") {
    auto manifest = ghl::load_manifest(fixture_dir() / "minicorp" / "manifest.json");
    REQUIRE(manifest.functions[0].strategy_path.has_value());
    auto strat = ghl::ingest_strategy(*manifest.functions[0].strategy_path);
    CHECK_FALSE(strat.body.empty());
    CHECK(strat.source == *manifest.functions[0].strategy_path);

    auto dir = make_temp_dir();
    write_file(dir / "empty.txt", "  \n");
    CHECK_THROWS_AS(ghl::ingest_strategy(dir / "empty.txt"), ghl::CorpusError);
    fs::remove_all(dir);
}
