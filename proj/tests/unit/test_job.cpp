#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "csflow/job.hpp"

using namespace csflow;

namespace {

const cplx I(0.0, 1.0);

std::string kind_and_message(const std::string& text, ErrorKind* kind = nullptr) {
    try {
        parse_config(text, "job.json");
    } catch (const Error& e) {
        if (kind) *kind = e.kind();
        return e.what();
    }
    return "";
}

const OutputFile& file(const JobResult& r, const std::string& name) {
    for (const auto& f : r.files)
        if (f.name == name) return f;
    throw std::runtime_error("missing " + name);
}

// rows of the CSV as numbers, header dropped
std::vector<std::vector<double>> csv_rows(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(row);
    }
    return rows;
}

const char* su2_job = R"({
  "preset": "su2",
  "weight": ["3/2"],
  "hamiltonian": [{"generator": "J0", "eps": 0.8}],
  "z0": [[0.4, -0.3]],
  "t_end": 3,
  "integrator": {"rtol": 1e-11, "atol": 1e-13, "max_step": 0.01, "sample_dt": 0.05},
  "outputs": ["trajectory", "phase", "validation"]
})";

std::string a2_table() {
    nlohmann::json t{{"series", "custom"}, {"rank", 2}, {"roots", {{1, 0}, {0, 1}, {1, 1}}}};
    t["n"] = {{-3, 1, 1},  {-3, 2, -1}, {-2, -1, 1}, {-2, 3, -1}, {-1, -2, -1}, {-1, 3, 1},
              {1, -3, -1}, {1, 2, 1},   {2, -3, 1},  {2, 1, -1},  {3, -2, 1},   {3, -1, -1}};
    return t.dump();
}

} // namespace

TEST(Job, ConfigErrorsNameTheirPlace) {
    ErrorKind k{};
    std::string m = kind_and_message("{\n  \"preset\": \"su2\",\n  \"t_end\": ,\n}", &k);
    EXPECT_EQ(k, ErrorKind::Config);
    EXPECT_NE(m.find("job.json:3:"), std::string::npos) << m;

    m = kind_and_message(R"({"algebra": {"series": "A", "rank": 0}})", &k);
    EXPECT_EQ(k, ErrorKind::Config);
    EXPECT_NE(m.find("/algebra/rank"), std::string::npos) << m;

    m = kind_and_message(R"({"preset": "su2", "frobnicate": 1})", &k);
    EXPECT_NE(m.find("/frobnicate"), std::string::npos) << m;

    m = kind_and_message(R"({"preset": "su3", "hamiltonian": [{"generator": "C44", "eps": 1}]})", &k);
    EXPECT_NE(m.find("unknown generator 'C44'"), std::string::npos) << m;

    m = kind_and_message(R"({"preset": "su2", "z0": [0, 1]})", &k);
    EXPECT_NE(m.find("/z0"), std::string::npos) << m;

    m = kind_and_message(R"({"preset": "su2", "outputs": ["phase"]})", &k);
    EXPECT_NE(m.find("phase needs"), std::string::npos) << m;
}

TEST(Job, HermiticityEnforcedAtParseTime) {
    ErrorKind k{};
    kind_and_message(R"({"preset": "su2", "hamiltonian": [{"generator": "J+", "eps": 1}]})", &k);
    EXPECT_EQ(k, ErrorKind::NonHermitianHamiltonian);
    EXPECT_EQ(exit_code_for(k), ExitConfig);
    kind_and_message(R"({"preset": "su2", "hamiltonian": [{"generator": "J0", "eps": [1, 0.5]}]})", &k);
    EXPECT_EQ(k, ErrorKind::NonHermitianHamiltonian);
    kind_and_message(R"({"preset": {"name": "grassmann", "m": 1, "n": 1},
                         "hamiltonian": {"eps01": [[[0, 1]]], "eps02": [[0]], "eps_plus": [[1]]}})",
                     &k);
    EXPECT_EQ(k, ErrorKind::NonHermitianBlocks);
    kind_and_message(R"({"preset": "oscillator", "hamiltonian": {"omega": [[[1, 1]]]}})", &k);
    EXPECT_EQ(k, ErrorKind::NonHermitianOmega);
    EXPECT_EQ(exit_code_for(ErrorKind::SingularMetric), ExitNumerical);
}

TEST(Job, SynthPresets) {
    auto su3 = run_synth(parse_config(R"({"preset": "su3"})"));
    auto doc = nlohmann::json::parse(file(su3, "operators.json").content);
    ASSERT_EQ(doc["operators"].size(), 9u);
    EXPECT_EQ(doc["operators"][3]["generator"], "C21");
    EXPECT_NE(file(su3, "operators.txt").content.find("C23 = d_z23 + (z12)*d_z13"), std::string::npos);

    auto su2 = run_synth(parse_config(R"({"preset": "su2"})"));
    auto d2 = nlohmann::json::parse(file(su2, "operators.json").content);
    ASSERT_EQ(d2["operators"].size(), 3u);
    EXPECT_EQ(d2["action"], "vector");

    auto a3 = run_synth(parse_config(R"({"algebra": {"series": "A", "rank": 3}, "weight": [2, 1, 1, 0]})"));
    EXPECT_EQ(nlohmann::json::parse(file(a3, "operators.json").content)["operators"].size(), 16u);
    EXPECT_EQ(file(a3, "operators.txt").content.find("w1"), std::string::npos);

    auto custom = run_synth(parse_config(R"({"algebra": {"custom": )" + a2_table() + "}}"));
    EXPECT_EQ(nlohmann::json::parse(file(custom, "operators.json").content)["operators"].size(), 8u);
}

TEST(Job, EvolveSu2RotationMatchesClosedForm) {
    auto cfg = parse_config(su2_job);
    auto r = run_evolve(cfg);
    EXPECT_EQ(r.exit_code, ExitOk) << r.message;
    cplx z0(0.4, -0.3);
    auto rows = csv_rows(file(r, "trajectory.csv").content);
    ASSERT_GE(rows.size(), 61u);
    for (const auto& row : rows) {
        ASSERT_EQ(row.size(), 6u);
        cplx want = std::exp(-I * 0.8 * row[0]) * z0;
        EXPECT_LT(std::abs(cplx(row[1], row[2]) - want), 1e-9) << row[0];
        // stationary |z|: the Berry part grows linearly
        EXPECT_NEAR(row[5], row[3] + row[4], 1e-12);
    }
    auto v = nlohmann::json::parse(file(r, "validation.json").content);
    EXPECT_TRUE(v["passed"].get<bool>());
}

TEST(Job, OutputIsByteIdentical) {
    auto a = run_evolve(parse_config(su2_job));
    auto b = run_evolve(parse_config(su2_job));
    ASSERT_EQ(a.files.size(), b.files.size());
    for (std::size_t i = 0; i < a.files.size(); ++i) EXPECT_EQ(a.files[i].content, b.files[i].content) << a.files[i].name;
    std::string head = file(a, "trajectory.csv").content;
    EXPECT_EQ(head.rfind("t,re_z,im_z,phi_dynamical,phi_berry,phi_total\n0,0.40000000000000002,", 0), 0u) << head.substr(0, 80);
}

TEST(Job, Su3FieldShowsDecoupling) {
    auto r = run_evolve(parse_config(R"({
      "preset": "su3",
      "hamiltonian": [
        {"generator": "C11", "eps": 0.3}, {"generator": "C22", "eps": -0.2},
        {"generator": "C12", "eps": [0.1, 0.2]}, {"generator": "C21", "eps": [0.1, -0.2]},
        {"generator": "C13", "eps": 0.25}, {"generator": "C31", "eps": 0.25},
        {"generator": "C23", "eps": [0, 0.2]}, {"generator": "C32", "eps": [0, -0.2]}
      ],
      "z0": [0.1, 0.2, [0, 0.1]],
      "t_end": 1,
      "outputs": ["field", "trajectory"]
    })"));
    ASSERT_EQ(r.exit_code, ExitOk);
    std::istringstream in(file(r, "field.txt").content);
    std::vector<std::string> lines;
    for (std::string l; std::getline(in, l);) lines.push_back(l);
    ASSERT_EQ(lines.size(), 3u);
    EXPECT_EQ(lines[0].rfind("i d/dt z12 = ", 0), 0u);
    EXPECT_EQ(lines[0].find("z23"), std::string::npos);
    EXPECT_EQ(lines[2].rfind("i d/dt z13 = ", 0), 0u);
    EXPECT_EQ(lines[2].find("z23"), std::string::npos);
    EXPECT_NE(lines[1].find("z23"), std::string::npos);
    auto doc = nlohmann::json::parse(file(r, "trajectory.json").content);
    EXPECT_EQ(doc["variables"].size(), 3u);
    EXPECT_EQ(doc["status"], "completed");
}

TEST(Job, OscillatorClosedForm) {
    auto r = run_evolve(parse_config(R"({
      "preset": {"name": "oscillator", "n": 1},
      "hamiltonian": {"omega": [[0.9]], "f": [[0.3, 0.1]]},
      "z0": [[-0.2, 0.5]],
      "t_end": 4,
      "integrator": {"rtol": 1e-13, "atol": 1e-15, "max_step": 0.01},
      "outputs": ["trajectory", "validation"]
    })"));
    ASSERT_EQ(r.exit_code, ExitOk) << r.message;
    cplx z0(-0.2, 0.5), f(0.3, 0.1);
    double w = 0.9;
    for (const auto& row : csv_rows(file(r, "trajectory.csv").content)) {
        cplx e = std::exp(-I * w * row[0]);
        EXPECT_LT(std::abs(cplx(row[1], row[2]) - (e * z0 + f * (e - 1.0) / w)), 1e-9);
    }
}

TEST(Job, BlowUpExitsNumerical) {
    // i z' = 1 + z^2 from z0 = 2i reaches the pole at t = atanh(1/2)
    auto r = run_evolve(parse_config(R"({
      "preset": {"name": "grassmann", "m": 1, "n": 1},
      "variant": "noncompact",
      "hamiltonian": {"eps01": [[0]], "eps02": [[0]], "eps_plus": [[1]]},
      "z0": [[0, 2]],
      "t_end": 2
    })"));
    EXPECT_EQ(r.exit_code, ExitNumerical);
    EXPECT_NE(r.message.find("blow"), std::string::npos) << r.message;
    auto doc = nlohmann::json::parse(file(r, "trajectory.json").content);
    EXPECT_NEAR(doc["t_star"].get<double>(), std::atanh(0.5), 5e-3);
}

TEST(Job, VerifyReportsNamedFailures) {
    std::string bad = a2_table();
    // break one structure constant pair consistently with antisymmetry
    auto t = nlohmann::json::parse(bad);
    for (auto& e : t["n"]) {
        if (e[0] == -2 && e[1] == 3) e[2] = -2;
        if (e[0] == 3 && e[1] == -2) e[2] = 2;
    }
    auto cfg = parse_config(R"({"algebra": {"custom": )" + t.dump() + "}}");
    auto r = run_verify(cfg);
    EXPECT_EQ(r.exit_code, ExitValidation);
    auto doc = nlohmann::json::parse(file(r, "verify.json").content);
    EXPECT_FALSE(doc["passed"].get<bool>());
    EXPECT_EQ(doc["checks"][0]["name"], "homomorphism");
    auto failures = doc["checks"][0]["failures"];
    ASSERT_GT(failures.size(), 1u);
    EXPECT_NE(failures[0].get<std::string>().find("JacobiViolation"), std::string::npos);
    EXPECT_NE(failures[1].get<std::string>().find("[E["), std::string::npos);

    auto good = run_verify(parse_config(R"({"algebra": {"custom": )" + a2_table() + "}}"));
    EXPECT_EQ(good.exit_code, ExitOk) << good.message;
}

TEST(Job, VerifyRiccatiReportsDeviation) {
    auto cfg = parse_config(R"({"preset": "su2", "seed": 7,
                                "verify": {"checks": ["riccati", "coefficients"], "draws": 3, "riccati": {"m": 2, "n": 2}}})");
    auto r = run_verify(cfg);
    EXPECT_EQ(r.exit_code, ExitOk) << r.message;
    auto doc = nlohmann::json::parse(file(r, "verify.json").content);
    EXPECT_EQ(doc["seed"], 7);
    ASSERT_EQ(doc["checks"].size(), 2u);
    double dev = std::stod(doc["checks"][0]["max_deviation"].get<std::string>());
    EXPECT_GT(dev, 0.0);
    EXPECT_LE(dev, 1e-6);
    EXPECT_EQ(run_verify(cfg).files[0].content, r.files[0].content);
}

TEST(Job, ShippedConfigsParse) {
    namespace fs = std::filesystem;
    int n = 0;
    for (const auto& e : fs::directory_iterator(CSFLOW_CONFIG_DIR)) {
        if (e.path().extension() != ".json") continue;
        EXPECT_NO_THROW(load_config(e.path().string())) << e.path();
        ++n;
    }
    EXPECT_GE(n, 8);
}
