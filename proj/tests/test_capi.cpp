#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include <json.hpp>

#include "pd/capi.h"

using nlohmann::json;

namespace {

// releases C-API strings and handles on scope exit
struct Str {
    char* p = nullptr;
    ~Str() { pd_string_free(p); }
    json as_json() const { return json::parse(p); }
};

struct Handle {
    pd_handle* h = nullptr;
    ~Handle() { pd_handle_free(h); }
};

const char* kUniquePoint = "s0 <- : 0.8.\ns1 <- ~s0 : 0.9.\n";
const char* kClash = "s0 <- ~s1 : 1.\ns1 <- : 1.\ns0 <- : 0.5.\n";
const char* kOverconstrained = "s0 <- : 0.5.\ns0 <- : 0.6.\ns1 <- : 1.\n";

}  // namespace

TEST_CASE("version string is present") {
    const char* v = pd_version();
    REQUIRE(v != nullptr);
    CHECK(std::string(v).find('.') != std::string::npos);
}

TEST_CASE("parse, counts, and serialize round trip through the C face") {
    Handle h;
    REQUIRE(pd_parse_text(kUniquePoint, &h.h) == PD_OK);
    CHECK(pd_atom_count(h.h) == 2);
    CHECK(pd_rule_count(h.h) == 2);
    Str s;
    REQUIRE(pd_serialize(h.h, &s.p) == PD_OK);
    CHECK(std::string(s.p) == kUniquePoint);
}

TEST_CASE("parse errors surface the location through pd_last_error") {
    pd_handle* h = reinterpret_cast<pd_handle*>(0x1);
    CHECK(pd_parse_text("s0 <-", &h) == PD_ERR_PARSE);
    CHECK(h == nullptr);
    CHECK(std::string(pd_last_error()).find("line") != std::string::npos);
}

TEST_CASE("null arguments are rejected uniformly") {
    CHECK(pd_parse_text(nullptr, nullptr) == PD_ERR_INVALID);
    Handle h;
    REQUIRE(pd_parse_text(kUniquePoint, &h.h) == PD_OK);
    CHECK(pd_parse_text(kUniquePoint, nullptr) == PD_ERR_INVALID);
    CHECK(pd_serialize(nullptr, nullptr) == PD_ERR_INVALID);
    CHECK(pd_check(h.h, nullptr, nullptr) == PD_ERR_INVALID);
    char* out = nullptr;
    CHECK(pd_solve(nullptr, nullptr, &out) == PD_ERR_INVALID);
    CHECK(pd_label_aa(nullptr, nullptr, &out) == PD_ERR_INVALID);
    CHECK(pd_convert_aa(nullptr, &out) == PD_ERR_INVALID);
    CHECK(pd_bench("{}", nullptr) == PD_ERR_INVALID);
    CHECK(std::string(pd_last_error()) == "null argument");
    CHECK(pd_atom_count(nullptr) == -1);
    CHECK(pd_rule_count(nullptr) == -1);
    pd_handle_free(nullptr);
    pd_string_free(nullptr);
}

TEST_CASE("file parsing reports missing paths as IO errors") {
    const char* path = "capi_roundtrip_tmp.pd";
    {
        std::ofstream out(path);
        out << kUniquePoint;
    }
    Handle h;
    REQUIRE(pd_parse_file(path, &h.h) == PD_OK);
    CHECK(pd_rule_count(h.h) == 2);
    std::remove(path);

    pd_handle* missing = nullptr;
    CHECK(pd_parse_file("no_such_dir/none.pd", &missing) == PD_ERR_IO);
    CHECK(missing == nullptr);
}

TEST_CASE("check separates plain-rule consistency from the closed-world "
          "extension") {
    Handle h;
    REQUIRE(pd_parse_text(kClash, &h.h) == PD_OK);

    Str closed;
    REQUIRE(pd_check(h.h, nullptr, &closed.p) == PD_OK);
    json jc = closed.as_json();
    CHECK(jc["mode"] == "pcwa");
    CHECK(jc["feasible"] == false);
    CHECK(jc["rule_psat"] == true);
    CHECK(jc["n_atoms"] == 2);
    CHECK(jc["n_rules"] == 3);
    CHECK(jc["residual"].get<double>() > 0.0);

    Str open;
    REQUIRE(pd_check(h.h, R"({"mode":"owa"})", &open.p) == PD_OK);
    json jo = open.as_json();
    CHECK(jo["feasible"] == true);
    CHECK(jo["rule_psat"] == true);
    CHECK(jo["residual"].get<double>() <= 1e-6);

    Handle over;
    REQUIRE(pd_parse_text(kOverconstrained, &over.h) == PD_OK);
    Str j;
    REQUIRE(pd_check(over.h, R"({"mode":"owa"})", &j.p) == PD_OK);
    json jv = j.as_json();
    CHECK(jv["feasible"] == false);
    CHECK(jv["rule_psat"] == false);
}

TEST_CASE("default solve is closed-world entropy maximization") {
    Handle h;
    REQUIRE(pd_parse_text(kUniquePoint, &h.h) == PD_OK);
    Str s;
    REQUIRE(pd_solve(h.h, nullptr, &s.p) == PD_OK);
    REQUIRE(s.p[std::string(s.p).size() - 1] == '\n');
    json j = s.as_json();
    CHECK(j["mode"] == "pcwa");
    CHECK(j["entropy"] == "max");
    CHECK(j["method"] == "max-entropy:newton");
    CHECK(j["converged"] == true);
    CHECK(j["residual"].get<double>() <= 1e-6);

    std::vector<double> pi = j["pi"].get<std::vector<double>>();
    REQUIRE(pi.size() == 4);
    std::vector<double> want{0.02, 0.18, 0.8, 0.0};
    for (int i = 0; i < 4; ++i)
        CHECK(std::abs(pi[i] - want[i]) <= 1e-6);

    // literal entries come in claim order, positive polarity first
    json lits = j["literals"];
    REQUIRE(lits.size() == 4);
    CHECK(lits[0]["literal"] == "s0");
    CHECK(std::abs(lits[0]["probability"].get<double>() - 0.8) <= 1e-6);
    CHECK(lits[0]["no_deduction"] == false);
    CHECK(lits[1]["literal"] == "~s0");
    CHECK(lits[1]["no_deduction"] == true);
    CHECK(lits[2]["literal"] == "s1");
    CHECK(std::abs(lits[2]["probability"].get<double>() - 0.18) <= 1e-6);
    CHECK(lits[3]["literal"] == "~s1");
    CHECK(std::abs(lits[3]["probability"].get<double>() - 0.82) <= 1e-6);
}

TEST_CASE("solver selection is honored and echoed") {
    Handle h;
    REQUIRE(pd_parse_text(kUniquePoint, &h.h) == PD_OK);

    Str sgd;
    REQUIRE(pd_solve(h.h, R"({"entropy":"none","solver":"sgd","seed":3})",
                     &sgd.p) == PD_OK);
    json js = sgd.as_json();
    CHECK(js["entropy"] == "none");
    CHECK(js["solver"] == "sgd");
    CHECK(js["method"] == "sgd");
    CHECK(js["epochs"].get<int>() > 0);

    Str lin;
    REQUIRE(pd_solve(h.h, R"({"entropy":"linear"})", &lin.p) == PD_OK);
    json jl = lin.as_json();
    CHECK(jl["method"].get<std::string>().rfind("linear-entropy", 0) == 0);
    CHECK(jl.contains("lambda"));

    Str lp;
    REQUIRE(pd_solve(h.h, R"({"entropy":"none"})", &lp.p) == PD_OK);
    CHECK(lp.as_json()["solver"] == "lp");
}

TEST_CASE("infeasible systems name the level that broke") {
    Handle clash;
    REQUIRE(pd_parse_text(kClash, &clash.h) == PD_OK);
    char* out = nullptr;
    CHECK(pd_solve(clash.h, nullptr, &out) == PD_ERR_SEMANTIC);
    CHECK(out == nullptr);
    CHECK(std::string(pd_last_error()).find("closed-world") !=
          std::string::npos);

    Handle over;
    REQUIRE(pd_parse_text(kOverconstrained, &over.h) == PD_OK);
    CHECK(pd_solve(over.h, R"({"mode":"owa"})", &out) == PD_ERR_SEMANTIC);
    CHECK(std::string(pd_last_error()).find("Rule-PSAT fails") !=
          std::string::npos);
}

TEST_CASE("relaxed solve answers on infeasible input instead of failing") {
    Handle over;
    REQUIRE(pd_parse_text(kOverconstrained, &over.h) == PD_OK);
    Str s;
    REQUIRE(pd_solve(over.h, R"({"mode":"owa","relax":true})", &s.p) == PD_OK);
    json j = s.as_json();
    CHECK(j["method"] == "l1-relaxed");
    CHECK(j["relax"] == true);
    CHECK(std::abs(j["l1_objective"].get<double>() - 0.1) <= 1e-6);
}

TEST_CASE("query returns one marginal with optional bounds") {
    Handle h;
    REQUIRE(pd_parse_text(kUniquePoint, &h.h) == PD_OK);

    Str plain;
    REQUIRE(pd_query(h.h, R"({"literal":"s1"})", &plain.p) == PD_OK);
    json jp = plain.as_json();
    CHECK(jp["literal"] == "s1");
    CHECK(std::abs(jp["probability"].get<double>() - 0.18) <= 1e-6);
    CHECK(jp["no_deduction"] == false);
    CHECK_FALSE(jp.contains("bounds"));

    Str neg;
    REQUIRE(pd_query(h.h, R"({"literal":"~s0","bounds":true})", &neg.p) ==
            PD_OK);
    json jn = neg.as_json();
    CHECK(std::abs(jn["probability"].get<double>() - 0.2) <= 1e-6);
    REQUIRE(jn["bounds"].size() == 2);
    double lo = jn["bounds"][0], hi = jn["bounds"][1];
    CHECK(lo <= jn["probability"].get<double>() + 1e-6);
    CHECK(hi >= jn["probability"].get<double>() - 1e-6);
    CHECK(std::abs(lo - 0.2) <= 1e-6);
    CHECK(std::abs(hi - 0.2) <= 1e-6);

    char* out = nullptr;
    CHECK(pd_query(h.h, R"({"literal":"zz"})", &out) == PD_ERR_INVALID);
    CHECK(std::string(pd_last_error()).find("unknown literal") !=
          std::string::npos);
    CHECK(pd_query(h.h, "{}", &out) == PD_ERR_INVALID);
}

TEST_CASE("arguments carry supports, attacks, and labels") {
    Handle h;
    REQUIRE(pd_parse_text(kUniquePoint, &h.h) == PD_OK);
    Str s;
    REQUIRE(pd_arguments(h.h, nullptr, &s.p) == PD_OK);
    json j = s.as_json();
    REQUIRE(j["arguments"].size() == 2);
    CHECK(j["arguments"][0]["claim"] == "s0");
    CHECK(j["arguments"][0]["support"] == json::array({"s0"}));
    CHECK(std::abs(j["arguments"][0]["probability"].get<double>() - 0.8) <=
          1e-6);
    CHECK(j["arguments"][1]["claim"] == "s1");
    CHECK(j["arguments"][1]["support"] == json::array({"~s0", "s1"}));
    CHECK(std::abs(j["arguments"][1]["probability"].get<double>() - 0.18) <=
          1e-6);
    REQUIRE(j["attacks"].size() == 1);
    CHECK(j["attacks"][0]["attacker"] == 0);
    CHECK(j["attacks"][0]["attackee"] == 1);
    CHECK(j["labels"] == json::array({"undec", "undec"}));
}

TEST_CASE("system dump prints one tagged row per constraint") {
    Handle h;
    REQUIRE(pd_parse_text(kUniquePoint, &h.h) == PD_OK);
    Str csv;
    REQUIRE(pd_dump_system(h.h, nullptr, &csv.p) == PD_OK);
    std::string text(csv.p);
    CHECK(text.rfind("tag,b,w0,w1,w2,w3\n", 0) == 0);
    CHECK(text.find("rule:0,") != std::string::npos);
    CHECK(text.find("rule:1,") != std::string::npos);
    CHECK(text.find("normalization,1,1,1,1,1") != std::string::npos);
    CHECK(text.find("pcwa:s0,") != std::string::npos);
    CHECK(text.find("pcwa:s1,") != std::string::npos);

    Str owa;
    REQUIRE(pd_dump_system(h.h, R"({"mode":"owa"})", &owa.p) == PD_OK);
    CHECK(std::string(owa.p).find("pcwa:") == std::string::npos);
}

TEST_CASE("attack graphs label through the full pipeline") {
    Str s;
    REQUIRE(pd_label_aa("arg(a). arg(b). att(a, b).", nullptr, &s.p) == PD_OK);
    json j = s.as_json();
    CHECK(j["arguments"] == json::array({"a", "b"}));
    CHECK(j["labels"] == json::array({"in", "out"}));
    CHECK(j["complete"] == true);
    CHECK(std::abs(j["probabilities"][0].get<double>() - 1.0) <= 1e-6);
    CHECK(std::abs(j["probabilities"][1].get<double>() - 0.0) <= 1e-6);
}

TEST_CASE("odd attack cycles have no consistent closed-world reading") {
    char* out = nullptr;
    CHECK(pd_label_aa("arg(a). arg(b). arg(c). att(a, b). att(b, c). att(c, a).",
                      nullptr, &out) == PD_ERR_SEMANTIC);
    CHECK(out == nullptr);
    CHECK(std::string(pd_last_error()).find("no consistent labelling") !=
          std::string::npos);
}

TEST_CASE("floating acceptance fails verification but still reports") {
    Str s;
    pd_status st = pd_label_aa(
        "arg(a). arg(b). arg(c). arg(d). att(a, b). att(b, a). "
        "att(a, c). att(b, c). att(c, d).",
        nullptr, &s.p);
    CHECK(st == PD_ERR_SEMANTIC);
    REQUIRE(s.p != nullptr);
    json j = s.as_json();
    CHECK(j["complete"] == false);
    CHECK(j["labels"].size() == 4);
    CHECK(std::string(pd_last_error()).find("completeness") !=
          std::string::npos);
}

TEST_CASE("attack graph conversion emits certain rules over negated "
          "attackers") {
    Str s;
    REQUIRE(pd_convert_aa("arg(a). arg(b). att(a, b).", &s.p) == PD_OK);
    CHECK(std::string(s.p) == "a <- : 1.\nb <- ~a : 1.\n");

    char* out = nullptr;
    CHECK(pd_convert_aa("arg(a). att(a, b).", &out) == PD_ERR_PARSE);
}

TEST_CASE("bench runs from a JSON spec and rejects bad specs") {
    Str csv;
    REQUIRE(pd_bench(
                R"({"n_literals":3,"n_rules":4,"repetitions":1,"backends":["lp"]})",
                &csv.p) == PD_OK);
    std::string text(csv.p);
    CHECK(text.rfind("backend,", 0) == 0);
    CHECK(text.find("\nlp,3,4,") != std::string::npos);

    char* out = nullptr;
    CHECK(pd_bench("{", &out) == PD_ERR_INVALID);
    CHECK(std::string(pd_last_error()).find("bad options JSON") !=
          std::string::npos);
    CHECK(pd_bench(R"({"backends":["qp"]})", &out) == PD_ERR_INVALID);
}

TEST_CASE("malformed option JSON and unknown enum values are invalid") {
    Handle h;
    REQUIRE(pd_parse_text(kUniquePoint, &h.h) == PD_OK);
    char* out = nullptr;
    CHECK(pd_solve(h.h, "{bad", &out) == PD_ERR_INVALID);
    CHECK(std::string(pd_last_error()).find("bad options JSON") !=
          std::string::npos);
    CHECK(pd_solve(h.h, R"({"entropy":"quadratic"})", &out) == PD_ERR_INVALID);
    CHECK(pd_solve(h.h, R"({"mode":"halfopen"})", &out) == PD_ERR_INVALID);
    CHECK(pd_solve(h.h, R"({"solver":"qp"})", &out) == PD_ERR_INVALID);
}

TEST_CASE("world cap trips the limit status") {
    std::string text = "s0 <- ";
    for (int i = 1; i < 25; ++i) {
        text += "s" + std::to_string(i);
        text += (i + 1 < 25) ? ", " : " : 0.5.";
    }
    Handle h;
    REQUIRE(pd_parse_text(text.c_str(), &h.h) == PD_OK);
    CHECK(pd_atom_count(h.h) == 25);
    char* out = nullptr;
    CHECK(pd_solve(h.h, nullptr, &out) == PD_ERR_LIMIT);
    CHECK(std::string(pd_last_error()).find("PD_WORLD_CAP") !=
          std::string::npos);
}
