#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "magic/figures.hpp"
#include "magic/io.hpp"
#include "magic/random.hpp"
#include "magic/sdp_json.hpp"

using namespace magic;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "magic_io_test";
  fs::create_directories(dir);
  return dir / name;
}

io::json state_json(const std::string& matrix, const std::string& extra = R"("dim": 2)") {
  return io::json::parse(R"({"schema_version": 1, )" + extra + R"(, "matrix": )" + matrix + "}");
}

}  // namespace

TEST(Io, DensityRoundTripIsExact) {
  random::Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = trial % 2 ? 2 : 3;
    const DensityMatrix rho = random::mixed_state(d, rng);
    const io::json j = io::to_json(io::document(rho));
    const io::json back = io::json::parse(j.dump());
    const DensityMatrix r2 = io::to_density(io::parse_matrix_document(back));
    EXPECT_EQ(max_abs(r2.matrix() - rho.matrix()), 0.0) << "trial " << trial;
  }
}

TEST(Io, ChoiRoundTripThroughFile) {
  random::Rng rng(32);
  const ChoiMatrix j = random::measure_prepare_channel(3, 2, rng);
  const fs::path path = scratch("choi.json");
  io::write_json_file(path.string(), io::to_json(io::document(j)));
  const io::MatrixDocument doc = io::read_matrix_document(path.string());
  EXPECT_EQ(doc.dims, (std::vector<int>{2, 3}));
  const ChoiMatrix back = io::to_choi(doc);
  EXPECT_EQ(max_abs(back.matrix() - j.matrix()), 0.0);
  EXPECT_THROW(io::to_density(doc), InputError);
}

TEST(Io, RejectsMalformedDocuments) {
  const std::string good = "[[[1,0],[0,0]],[[0,0],[0,0]]]";
  EXPECT_NO_THROW(io::to_density(io::parse_matrix_document(state_json(good))));
  EXPECT_THROW(io::parse_matrix_document(io::json::array()), InputError);
  EXPECT_THROW(io::parse_matrix_document(io::json::parse(R"({"dim": 2, "matrix": [[[1,0]]]})")),
               InputError);
  EXPECT_THROW(io::parse_matrix_document(state_json(good, R"("dim": 3)")), InputError);
  EXPECT_THROW(io::parse_matrix_document(state_json(good, R"("dim": "two")")), InputError);
  EXPECT_THROW(io::parse_matrix_document(state_json(good, R"("dims": [2, -1])")), InputError);
  EXPECT_THROW(io::parse_matrix_document(state_json(good, R"("other": 2)")), InputError);
  EXPECT_THROW(io::parse_matrix_document(
                   io::json::parse(R"({"schema_version": 2, "dim": 2, "matrix": )" + good + "}")),
               InputError);
  EXPECT_THROW(io::parse_matrix_document(state_json("[[[1,0],[0,0]],[[0,0]]]")), InputError);
  EXPECT_THROW(io::parse_matrix_document(state_json("[[[1,0],[0,0]],[[0,0],[0]]]")), InputError);
  EXPECT_THROW(io::parse_matrix_document(state_json("[[[1,0],[0,0]],[[0,0],[\"a\",0]]]")),
               InputError);
  EXPECT_THROW(io::parse_matrix_document(state_json("[]")), InputError);
  // Well-formed but not a state.
  EXPECT_THROW(io::to_density(io::parse_matrix_document(state_json("[[[1,0],[0,0]],[[0,0],[1,0]]]"))),
               InvariantViolation);
  EXPECT_THROW(io::to_density(io::parse_matrix_document(state_json("[[[1,0],[1,0]],[[0,0],[0,0]]]"))),
               InvariantViolation);
}

TEST(Io, RejectsUnreadableFiles) {
  EXPECT_THROW(io::read_json_file("/nonexistent/state.json"), InputError);
  const fs::path bad = scratch("bad.json");
  {
    std::ofstream(bad) << "{\"schema_version\": 1,";
  }
  EXPECT_THROW(io::read_json_file(bad.string()), InputError);
  EXPECT_THROW(io::named_state(bad.string()), InputError);
}

TEST(Io, NamedStates) {
  EXPECT_LT(max_abs(io::named_state("T").matrix() - states::t_state().matrix()), 1e-15);
  EXPECT_LT(max_abs(io::named_state("H").matrix() - states::h_state().matrix()), 1e-15);
  EXPECT_EQ(io::named_state("mixed").dim(), 2);
  EXPECT_EQ(io::named_state("mixed:3").dim(), 3);
  EXPECT_EQ(io::named_state("zero:5").matrix()(0, 0), Complex(1.0));
  EXPECT_THROW(io::named_state("mixed:x"), InputError);
  EXPECT_THROW(io::named_state("zero:3x"), InputError);
  EXPECT_THROW(io::named_state("zero:0"), InputError);
  const DensityMatrix a = io::named_state(std::string(MAGIC_DATA_DIR) + "/appendix_rho.json");
  EXPECT_EQ(a.dim(), 3);
}

TEST(Io, ResultDocuments) {
  const ConversionResult r = check_conversion(states::basis_state(2, 0), states::t_state());
  const io::json j = io::to_json(r);
  EXPECT_EQ(j.at("verdict"), "Infeasible");
  EXPECT_TRUE(j.contains("witness"));
  EXPECT_FALSE(j.contains("choi"));
  EXPECT_EQ(j.at("witness").at("p").size(), 48u);
  EXPECT_TRUE(j.at("margins").at("map_error").is_null());
  const io::json m = io::to_json(monotone(states::basis_state(2, 0), 1.0, states::t_state()));
  EXPECT_NEAR(m.at("value").get<double>(), m.at("q_value").get<double>() - m.at("c_constant").get<double>(),
              1e-15);
}

TEST(Io, SdpDocumentRoundTrip) {
  const ConversionSdp c = build_conversion_sdp(states::t_state(), states::h_state());
  const io::json j = sdp::to_json(c.problem);
  const sdp::SdpProblem back = sdp::problem_from_json(io::json::parse(j.dump()));
  EXPECT_EQ(sdp::to_json(back), j);
  EXPECT_EQ(back.equalities().size(), c.problem.equalities().size());
  EXPECT_EQ(sdp::feasibility(back).status, sdp::feasibility(c.problem).status);
  io::json broken = j;
  broken["blocks"][0]["kind"] = "cone";
  EXPECT_THROW(sdp::problem_from_json(broken), InputError);
  broken = j;
  broken.erase("equalities");
  EXPECT_THROW(sdp::problem_from_json(broken), InputError);
}

TEST(Csv, Formats) {
  std::ostringstream a, b, c;
  figures::write_csv(a, std::vector<figures::Fig3Row>{{1.0, 0.25, 1.0 / 3}});
  EXPECT_EQ(a.str(), "t,alpha,M\n1,0.25,0.333333333333\n");
  figures::write_csv(b, std::vector<figures::Fig2Row>{{-0.5, 0.0, 1e-13}});
  EXPECT_EQ(b.str(), "x,y,M\n-0.5,0,1e-13\n");
  figures::write_csv(c, std::vector<figures::ThresholdRow>{
                            {2.0, 0.58}, {3.0, std::numeric_limits<double>::quiet_NaN()}});
  EXPECT_EQ(c.str(), "t,alpha_first_positive\n2,0.58\n3,nan\n");
}

TEST(Figures, Grids) {
  const auto g = figures::default_alpha_grid(0.01);
  ASSERT_EQ(g.size(), 101u);
  EXPECT_EQ(g.front(), 0.0);
  EXPECT_EQ(g.back(), 1.0);
  EXPECT_EQ(g[58], 0.58);
  const auto d = figures::disk_grid(5);
  EXPECT_EQ(d.size(), 13u);  // x, y in {-1, -0.5, 0, 0.5, 1} with x^2 + y^2 <= 1
  EXPECT_THROW(figures::disk_grid(1), InvariantViolation);
  EXPECT_THROW(figures::figure3_scan({1.0}, {1.5}), InvariantViolation);
}

TEST(Figures, ParallelMapKeepsOrderAndRethrows) {
  const auto v = figures::parallel_map<int>(100, [](std::size_t i) { return int(i * i); }, 4);
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(v[i], int(i * i));
  EXPECT_THROW(figures::parallel_map<int>(
                   10, [](std::size_t i) -> int { if (i == 7) throw InputError("x"); return 0; }, 3),
               InputError);
  const auto serial = figures::figure3_scan({1.0}, {0.0, 0.6, 1.0}, 1);
  const auto threaded = figures::figure3_scan({1.0}, {0.0, 0.6, 1.0}, 3);
  for (std::size_t i = 0; i < serial.size(); ++i) EXPECT_EQ(serial[i].m, threaded[i].m);
}
