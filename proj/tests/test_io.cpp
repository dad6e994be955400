#include <gtest/gtest.h>

#include <cstring>
#include <random>
#include <sstream>

#include "sdooop/ensemble.hpp"
#include "sdooop/io/csv.hpp"
#include "sdooop/io/snapshot.hpp"
#include "sdooop/io/units.hpp"

using namespace sdooop;

TEST(Duration, Suffixes)
{
    EXPECT_EQ(io::parse_duration("90"), 90.0);
    EXPECT_EQ(io::parse_duration("90s"), 90.0);
    EXPECT_EQ(io::parse_duration("2000m"), 120000.0);
    EXPECT_EQ(io::parse_duration("1.5h"), 5400.0);
    EXPECT_EQ(io::parse_duration("1d"), 86400.0);
    EXPECT_EQ(io::parse_duration("1w"), 604800.0);
}

TEST(Duration, Malformed)
{
    for (const char* bad : {"", "m", "1x", "1 h", "-3s", "abc", "inf"})
        EXPECT_THROW(io::parse_duration(bad), InvalidParameter) << bad;
}

TEST(FormatDouble, RoundTrips)
{
    std::mt19937_64 rng(8);
    for (int i = 0; i < 10000; ++i) {
        std::uint64_t bits = rng();
        double v;
        std::memcpy(&v, &bits, sizeof v);
        if (!std::isfinite(v))
            continue;
        const std::string s = io::format_double(v);
        EXPECT_EQ(io::parse_double(s, 1, "x"), v) << s;
    }
}

TEST(StreamReader, ReadsLabeledRows)
{
    std::istringstream in("t,f0,f1,label\n0,1.5,2\n\n1,3,4,2\n");
    // second line is short on purpose: the reader must name the line
    io::StreamReader r(in);
    EXPECT_EQ(r.dims(), 2u);
    EXPECT_TRUE(r.has_label());
    try {
        r.next();
        FAIL() << "expected ParseError";
    } catch (const io::ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
    const auto row = r.next();
    ASSERT_TRUE(row);
    EXPECT_EQ(row->line, 4u);
    EXPECT_EQ(row->v, (std::vector<double>{3.0, 4.0}));
    EXPECT_EQ(row->label, 2);
    EXPECT_FALSE(r.next());
}

TEST(StreamReader, Errors)
{
    auto first_error_line = [](const std::string& text) -> std::size_t {
        std::istringstream in(text);
        try {
            io::StreamReader r(in);
            while (r.next()) {
            }
        } catch (const io::ParseError& e) {
            return e.line();
        }
        return 0;
    };
    EXPECT_EQ(first_error_line(""), 1u);
    EXPECT_EQ(first_error_line("x,f0\n"), 1u);
    EXPECT_EQ(first_error_line("t\n"), 1u);
    EXPECT_EQ(first_error_line("t,f0\n1,2\n2,abc\n"), 3u);
    EXPECT_EQ(first_error_line("t,f0,label\n1,2,0\n2,3,5\n"), 3u);
    EXPECT_EQ(first_error_line("t,f0\r\n1,2\r\n"), 0u);
}

TEST(ScoreCsv, RoundTrip)
{
    std::vector<ScoreRecord> recs = {{0.0, 0.0, true, 0, true}, {1.25, 0.1 + 0.2, false, 17, false}};
    std::ostringstream out;
    io::write_score_header(out);
    for (const auto& r : recs)
        io::write_score_row(out, r);
    std::istringstream in(out.str());
    io::ScoreReader reader(in);
    for (const auto& r : recs)
        EXPECT_EQ(*reader.next(), r);
    EXPECT_FALSE(reader.next());

    std::istringstream bad("t,score,warmup,n_active,sampled\n1,2,3,4,0\n");
    io::ScoreReader br(bad);
    EXPECT_THROW(br.next(), io::ParseError);
}

namespace {

ModelSnapshot trained(std::uint64_t seed)
{
    ModelParams p;
    p.k = 12;
    p.x = 3;
    p.T = 50.0;
    p.T0 = 7.0;
    p.n_bins = 4;
    p.seed = seed;
    Model m(p);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    for (int i = 0; i < 300; ++i)
        m.process(std::vector<double>{g(rng), g(rng)}, 0.5 * i);
    return m.snapshot();
}

} // namespace

TEST(Snapshot, ModelDocumentRoundTrip)
{
    const auto s = trained(3);
    EXPECT_EQ(io::parse_snapshot(io::dump_snapshot(s)), s);
}

TEST(Snapshot, EnsembleDocumentRoundTrip)
{
    const std::vector<ModelSnapshot> members = {trained(3), trained(4), trained(5)};
    const std::string doc = io::dump_snapshots(members);
    EXPECT_NE(doc.find("sdooop-ensemble"), std::string::npos);
    EXPECT_EQ(io::parse_snapshots(doc), members);
    EXPECT_THROW(io::parse_snapshot(doc), SnapshotError);
    // a single member is written as a plain model document
    EXPECT_NE(io::dump_snapshots({members[0]}).find("sdooop-model"), std::string::npos);
}

TEST(Snapshot, RejectsBadDocuments)
{
    auto doc = io::to_json(trained(3));
    EXPECT_THROW(io::parse_snapshot("{not json"), SnapshotError);
    auto wrong_version = doc;
    wrong_version["version"] = 2;
    EXPECT_THROW(io::parse_snapshot(wrong_version.dump()), SnapshotError);
    auto wrong_format = doc;
    wrong_format["format"] = "something-else";
    EXPECT_THROW(io::parse_snapshot(wrong_format.dump()), SnapshotError);
    auto missing = doc;
    missing.erase("rng");
    EXPECT_THROW(io::parse_snapshot(missing.dump()), SnapshotError);
    auto short_coeffs = doc;
    short_coeffs["observers"][0]["coeffs"].erase(0);
    EXPECT_THROW(io::parse_snapshot(short_coeffs.dump()), SnapshotError);
    EXPECT_THROW(io::parse_snapshots(R"({"format":"sdooop-ensemble","version":1,"members":[]})"), SnapshotError);
}
