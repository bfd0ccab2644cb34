#include "support.hpp"

#include <gtest/gtest.h>

using namespace unirigid;

TEST(FrameworkJson, ParsesFixture) {
    const Framework fw = support::load("onepole");
    EXPECT_EQ(fw.n(), 4);
    EXPECT_EQ(fw.m(), 6);
    EXPECT_EQ(fw.graph.member(0), (Member{0, 2, MemberKind::Cable}));
    EXPECT_EQ(fw.graph.member(2).kind, MemberKind::Strut);
}

TEST(FrameworkJson, KindDefaultsToBar) {
    const Framework fw = parse_framework(R"({"dim":1,"vertices":[[0],[1]],"members":[{"i":1,"j":2}]})");
    EXPECT_EQ(fw.graph.member(0).kind, MemberKind::Bar);
}

TEST(FrameworkJson, SyntaxErrorHasLineAndColumn) {
    try {
        parse_framework("{\"dim\": 2,\n \"vertices\": [[0,0],[1,0]]\n \"members\": []}", "f.json");
        FAIL();
    } catch (const ParseError& e) {
        // Position of the last character read: the end of the unexpected "members" token.
        EXPECT_EQ(e.line(), 3);
        EXPECT_EQ(e.column(), 10);
        EXPECT_EQ(std::string(e.what()), "f.json:3:10: JSON syntax error");
    }
}

TEST(FrameworkJson, SchemaErrorsNameThePath) {
    auto message = [](const std::string& text) {
        try {
            parse_framework(text);
        } catch (const ParseError& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    EXPECT_EQ(message(R"({"vertices":[],"members":[]})"), "$: missing key \"dim\"");
    EXPECT_EQ(message(R"({"dim":2,"vertices":[[0,0],[1]],"members":[]})"), "$.vertices[1]: expected 2 coordinates");
    EXPECT_EQ(message(R"({"dim":2,"vertices":[[0,0],[1,"a"]],"members":[]})"), "$.vertices[1][1]: expected a number");
    EXPECT_EQ(message(R"({"dim":1,"vertices":[[0],[1]],"members":[{"i":1,"j":3}]})"),
              "$.members[0]: vertex index out of range 1..2");
    EXPECT_EQ(message(R"({"dim":1,"vertices":[[0],[1]],"members":[{"i":1,"j":2,"kind":"rope"}]})"),
              "$.members[0].kind: expected \"bar\", \"cable\" or \"strut\"");
    EXPECT_EQ(message(R"({"dim":1,"vertices":[[0],[1]],"members":[{"i":1,"j":1}]})"), "$: member 0 is a loop");
    EXPECT_EQ(message(R"({"dim":1,"vertices":[[0],[1]],"members":[{"i":1,"j":2},{"i":2,"j":1}]})"),
              "$: member 1 duplicates an earlier member");
}

TEST(FrameworkJson, RoundTrip) {
    const Framework fw = support::load("onepole");
    const Framework back = framework_from_json(framework_to_json(fw));
    EXPECT_EQ(back.graph.members(), fw.graph.members());
    EXPECT_EQ(back.config.matrix(), fw.config.matrix());
}

TEST(CertificateJson, ParsesAndRejectsUnknownMembers) {
    const Framework lad = support::load("ladder");
    const Certificate c = support::load_cert("ladder", lad);
    ASSERT_EQ(c.levels.size(), 2u);
    EXPECT_EQ(c.levels[0][0], -1.0);
    EXPECT_EQ(c.declared_ranks, (std::vector<int>{2, 1}));
    EXPECT_THROW(parse_certificate(R"({"levels":[{"stress":[{"i":1,"j":6,"w":1}]}]})", lad.graph), ParseError);
    EXPECT_THROW(parse_certificate(R"({"levels":[{"stress":[{"i":1,"j":2}]}]})", lad.graph), ParseError);
}

TEST(CertificateJson, RoundTripDropsZeros) {
    const Framework lad = support::load("ladder");
    const Certificate c = support::load_cert("ladder", lad);
    const Json j = certificate_to_json(c, lad.graph);
    EXPECT_EQ(j["levels"][1]["stress"].size(), 3u);
    const Certificate back = certificate_from_json(j, lad.graph);
    EXPECT_EQ(back.levels[0], c.levels[0]);
    EXPECT_EQ(back.levels[1], c.levels[1]);
}

TEST(VerdictJson, DeterministicAndComplete) {
    const Framework lad = support::load("ladder");
    const Verdict v = decide_universal(lad, support::load_cert("ladder", lad));
    const ReportContext ctx{"verify", TolerancePolicy{}, std::nullopt, std::nullopt, std::nullopt, std::nullopt, true};
    const std::string a = dump(verdict_to_json(v, ctx));
    const std::string b = dump(verdict_to_json(decide_universal(lad, support::load_cert("ladder", lad)), ctx));
    EXPECT_EQ(a, b);
    const Json j = Json::parse(a);
    EXPECT_EQ(j["tool"], "unirigid");
    EXPECT_EQ(j["exit_code"], kExitDimensionallyRigid);
    EXPECT_EQ(j["ranks"], Json::array({2, 1}));
    EXPECT_TRUE(j["levels"][0].contains("omega_star"));
    EXPECT_TRUE(j["tolerances"].contains("rank_rel_tol"));
}

TEST(ExitCodes, Classes) {
    Verdict v;
    v.dimensionally_rigid = TriState::Yes;
    v.universally_rigid = TriState::Yes;
    EXPECT_EQ(exit_code(v), 0);
    v.universally_rigid = TriState::Inconclusive;
    EXPECT_EQ(exit_code(v), 10);
    v.dimensionally_rigid = TriState::No;
    EXPECT_EQ(exit_code(v), 20);
    v.dimensionally_rigid = TriState::Inconclusive;
    EXPECT_EQ(exit_code(v), 30);
}

TEST(MatrixJson, RejectsRaggedRows) {
    EXPECT_THROW(matrix_from_json(Json::parse("[[1,2],[3]]")), ParseError);
    EXPECT_EQ(matrix_from_json(Json::parse("[[1,2],[3,4]]"))(1, 0), 3.0);
}
