#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "smoothrank/model_io.hpp"
#include "synthetic.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Workspace {
 public:
  Workspace() : dir_(fs::temp_directory_path() / "smoothrank_cli_test") {
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  ~Workspace() { fs::remove_all(dir_); }

  fs::path path(const std::string& name) const { return dir_ / name; }

  void write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name), std::ios::binary) << text;
  }

  Run run(const std::string& args) const {
    const std::string cmd = std::string(SMOOTHRANK_CLI) + " " + args + " > " +
                            path("stdout").string() + " 2> " + path("stderr").string();
    const int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(path("stdout"));
    r.err = slurp(path("stderr"));
    return r;
  }

 private:
  fs::path dir_;
};

std::string classification_csv() {
  const auto d = synthetic::shifted(120, 3, 1.0, 5);
  std::string s = "a,b,c,label\n";
  for (std::size_t r = 0; r < d.x.rows(); ++r) {
    for (std::size_t c = 0; c < 3; ++c) s += std::to_string(d.x(r, c)) + ",";
    s += d.y[r] == 1 ? "pos\n" : "zneg\n";
  }
  return s;
}

std::string survival_csv() {
  const auto d = synthetic::exponential_survival(150, 2, 1.0, 6);
  std::string s = "time,event,u,v\n";
  for (std::size_t r = 0; r < d.x.rows(); ++r) {
    s += std::to_string(d.records[r].time) + "," + std::to_string(d.records[r].event) + "," +
         std::to_string(d.x(r, 0)) + "," + std::to_string(d.x(r, 1)) + "\n";
  }
  return s;
}

}  // namespace

TEST_CASE("train, score and inspect") {
  Workspace ws;
  ws.write("d.csv", classification_csv());
  const std::string model = ws.path("m.json").string();
  const Run t = ws.run("train --input " + ws.path("d.csv").string() +
                       " --label-col label --out " + model);
  REQUIRE(t.code == 0);
  CHECK(t.out.find("features used:") != std::string::npos);
  REQUIRE(fs::exists(model));
  const smoothrank::SmoothRankModel m = smoothrank::load_model(model);
  CHECK(m.features_used() >= 1);

  const Run s = ws.run("score --input " + ws.path("d.csv").string() + " --model " + model);
  REQUIRE(s.code == 0);
  CHECK(s.out.rfind("row_index,score\n", 0) == 0);
  CHECK(std::count(s.out.begin(), s.out.end(), '\n') == 121);

  const Run i = ws.run("inspect --model " + model);
  REQUIRE(i.code == 0);
  std::istringstream lines(i.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "feature,grid,raw_q,q_smooth,masked,weight");
  std::map<std::string, std::size_t> rows;
  std::map<std::string, double> weight;
  while (std::getline(lines, line)) {
    const std::string feature = line.substr(0, line.find(','));
    ++rows[feature];
    weight[feature] = std::stod(line.substr(line.rfind(',') + 1));
  }
  REQUIRE(rows.size() == 3);
  for (std::size_t c = 0; c < 3; ++c) {
    const std::string& name = m.feature_names[c];
    CHECK(rows[name] == smoothrank::kGridSize);
    CHECK(weight[name] == m.weights[c]);
  }
}

TEST_CASE("inspect shows a dead feature with zero weight and full mask") {
  Workspace ws;
  std::string csv = classification_csv();
  // Append a constant column.
  std::string out;
  std::istringstream in(csv);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    out += line + (header ? ",flat\n" : ",1\n");
    header = false;
  }
  ws.write("d.csv", out);
  const std::string model = ws.path("m.json").string();
  REQUIRE(ws.run("train --input " + ws.path("d.csv").string() + " --label-col label --out " +
                 model).code == 0);
  const Run i = ws.run("inspect --model " + model);
  REQUIRE(i.code == 0);
  std::istringstream lines(i.out);
  std::size_t flat_rows = 0;
  while (std::getline(lines, line)) {
    if (line.rfind("flat,", 0) != 0) continue;
    ++flat_rows;
    CHECK(line.find(",1,0") != std::string::npos);
  }
  CHECK(flat_rows == smoothrank::kGridSize);
}

TEST_CASE("survival training") {
  Workspace ws;
  ws.write("s.csv", survival_csv());
  const Run t = ws.run("train --input " + ws.path("s.csv").string() + " --out " +
                       ws.path("m.json").string());
  REQUIRE(t.code == 0);
  CHECK(t.out.find("threshold") != std::string::npos);
}

TEST_CASE("user errors exit with 2") {
  Workspace ws;
  ws.write("d.csv", classification_csv());
  ws.write("empty.csv", "");
  const Run missing = ws.run("train --input " + ws.path("d.csv").string() +
                             " --label-col nosuchcol --out " + ws.path("m.json").string());
  CHECK(missing.code == 2);
  CHECK(missing.err.find("nosuchcol") != std::string::npos);
  CHECK(ws.run("train --input " + ws.path("empty.csv").string() + " --label-col label").code == 2);
  CHECK(ws.run("train --input " + ws.path("nope.csv").string() + " --label-col label").code == 2);
  CHECK(ws.run("frobnicate").code == 2);
  ws.write("bad.json", "{\"format\": \"smoothrank-model/9\"}");
  CHECK(ws.run("inspect --model " + ws.path("bad.json").string()).code == 2);
}

TEST_CASE("bench reports and config file") {
  Workspace ws;
  ws.write("d.csv", classification_csv());
  const std::string input = ws.path("d.csv").string();
  const Run a = ws.run("bench-rank --input " + input + " --label-col label --repeats 4 --out " +
                       ws.path("a.csv").string());
  REQUIRE(a.code == 0);
  const std::string report = slurp(ws.path("a.csv"));
  CHECK(report.rfind("dataset,n_rows,n_cols,metric,mean,sd,mean_features,n_splits\n", 0) == 0);

  nlohmann::json cfg{{"input", input}, {"label-col", "label"}, {"repeats", 4}, {"seed", 1}};
  ws.write("cfg.json", cfg.dump());
  const Run b = ws.run("bench-rank --config " + ws.path("cfg.json").string() + " --out " +
                       ws.path("b.csv").string() + " --serial");
  REQUIRE(b.code == 0);
  CHECK(slurp(ws.path("b.csv")) == report);

  // An explicit flag beats the config value.
  const Run c = ws.run("bench-rank --config " + ws.path("cfg.json").string() +
                       " --repeats 3 --out " + ws.path("c.csv").string());
  REQUIRE(c.code == 0);
  CHECK(slurp(ws.path("c.csv")).find(",3\n") != std::string::npos);

  ws.write("s.csv", survival_csv());
  const Run s = ws.run("bench-surv --input " + ws.path("s.csv").string() +
                       " --repeats 3 --missing-filter 1.0");
  REQUIRE(s.code == 0);
  CHECK(s.out.find("CI") != std::string::npos);
}

TEST_CASE("impute writes a complete table") {
  Workspace ws;
  ws.write("m.csv", "a,b,label\n1,2,x\nNA,3,y\n2,NA,x\n4,5,y\n3,4,x\n");
  const Run r = ws.run("impute --input " + ws.path("m.csv").string() +
                       " --label-col label --missing-filter 1.0 --out " +
                       ws.path("o.csv").string());
  REQUIRE(r.code == 0);
  const std::string out = slurp(ws.path("o.csv"));
  CHECK(out.find("NA") == std::string::npos);
  CHECK(out.find("label") != std::string::npos);
}
