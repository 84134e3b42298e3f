#include "nbhd/cell_table.hpp"
#include "nbhd/csv.hpp"
#include "nbhd/error.hpp"
#include "support.hpp"

#include <doctest.h>

#include <sstream>

using namespace nbhd;

TEST_CASE("csv parser handles quoting, CRLF and BOM") {
    std::istringstream in("\xEF\xBB\xBFid,name,value\r\n1,\"a, b\",2.5\r\n2,\"say \"\"hi\"\"\",3\r\n");
    const auto t = csv::parse(in);
    REQUIRE(t.header == std::vector<std::string>{"id", "name", "value"});
    REQUIRE(t.records.size() == 2);
    CHECK(t.records[0][1] == "a, b");
    CHECK(t.records[1][1] == "say \"hi\"");
}

TEST_CASE("csv parser rejects ragged rows and empty input") {
    std::istringstream ragged("a,b\n1,2\n3\n");
    CHECK_THROWS_AS(csv::parse(ragged), Error);
    std::istringstream empty("");
    CHECK_THROWS_AS(csv::parse(empty), Error);
}

TEST_CASE("number formatting round-trips exactly") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> d(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double v = d(gen) * std::pow(10.0, static_cast<int>(gen() % 40) - 20);
        double back = 0.0;
        REQUIRE(csv::parse_double(csv::format_double(v), back));
        CHECK(back == v);
    }
    double nan = 0.0;
    CHECK(csv::parse_double("NA", nan));
    CHECK(std::isnan(nan));
    double bad = 0.0;
    CHECK_FALSE(csv::parse_double("1,5", bad));
}

TEST_CASE("load_cells_csv reads a table and keeps labels verbatim") {
    testing::TempDir dir("cells");
    testing::write_text(dir.file("c.csv"),
                        "cellLabel,X,Y,Group,CD45,HLA Class 1\n"
                        "c1,1.5,2,Immune,0.25,-1\n"
                        "c2,3,4,unidentified,1,0.5\n");
    ColumnSchema schema;
    schema.id = "cellLabel";
    schema.x = "X";
    schema.y = "Y";
    schema.cell_type = "Group";
    const auto t = load_cells_csv(dir.file("c.csv"), schema);
    CHECK(t.size() == 2);
    CHECK(t.feature_names() == std::vector<std::string>{"CD45", "HLA Class 1"});
    CHECK(t.cell_types[1] == "unidentified");
    CHECK(t.coords(0, 0) == 1.5);
    CHECK(t.expression(1, 1) == 0.5);
}

TEST_CASE("expression column range selects an inclusive header span") {
    testing::TempDir dir("range");
    testing::write_text(dir.file("c.csv"), "id,x,y,cell_type,a,dsDNA,m,HLA Class 1,z\n1,0,0,T,9,1,2,3,9\n");
    ColumnSchema schema;
    schema.expression_first = "dsDNA";
    schema.expression_last = "HLA Class 1";
    const auto t = load_cells_csv(dir.file("c.csv"), schema);
    CHECK(t.feature_names() == std::vector<std::string>{"dsDNA", "m", "HLA Class 1"});
}

TEST_CASE("single-row single-feature table loads") {
    testing::TempDir dir("one");
    testing::write_text(dir.file("c.csv"), "id,x,y,cell_type,f\n1,0,0,T,2\n");
    const auto t = load_cells_csv(dir.file("c.csv"), {});
    CHECK(t.size() == 1);
    CHECK(t.expression.cols() == 1);
}

TEST_CASE("a NaN expression value is rejected with its row number") {
    testing::TempDir dir("nan");
    testing::write_text(dir.file("c.csv"), "id,x,y,cell_type,f\n1,0,0,T,2\n2,1,1,T,NaN\n");
    try {
        load_cells_csv(dir.file("c.csv"), {});
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Validation);
        CHECK(std::string(e.what()).find("row(s) 2") != std::string::npos);
    }
}

TEST_CASE("schema errors name the missing column; duplicate ids are invalid") {
    testing::TempDir dir("schema");
    testing::write_text(dir.file("a.csv"), "id,x,cell_type,f\n1,0,T,2\n");
    try {
        load_cells_csv(dir.file("a.csv"), {});
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Schema);
        CHECK(std::string(e.what()).find("'y'") != std::string::npos);
    }
    testing::write_text(dir.file("b.csv"), "id,x,y,cell_type,f\n1,0,0,T,2\n1,0,0,T,2\n");
    CHECK_THROWS_AS(load_cells_csv(dir.file("b.csv"), {}), Error);
}

TEST_CASE("cell table load, write, load is the identity") {
    testing::TempDir dir("rt");
    std::mt19937_64 gen(3);
    CellTable t;
    const std::size_t n = 50;
    t.coords = testing::uniform_coords(gen, n, 100.0);
    t.expression = testing::random_matrix(gen, n, 4);
    t.expression.set_col_names({"A", "B,C", "D \"q\"", "E"});
    for (std::size_t i = 0; i < n; ++i) {
        t.ids.push_back("cell " + std::to_string(i));
        t.cell_types.push_back(i % 3 ? "Tumor" : "Immune, CD4");
    }
    write_cells_csv(t, dir.file("t.csv"));
    const auto back = load_cells_csv(dir.file("t.csv"), {});
    CHECK(back.ids == t.ids);
    CHECK(back.cell_types == t.cell_types);
    CHECK(back.coords == t.coords);
    CHECK(back.expression == t.expression);
}

TEST_CASE("matrix csv round trip, id column and degenerate matrix") {
    testing::TempDir dir("m");
    Matrix eye(2, 2, {1, 0, 0, 1}, {"a", "b"});
    write_matrix_csv(eye, dir.file("eye.csv"));
    CHECK(testing::read_text(dir.file("eye.csv")) == "a,b\n1,0\n0,1\n");
    CHECK(read_matrix_csv(dir.file("eye.csv")).matrix == eye);

    std::mt19937_64 gen(11);
    auto m = testing::random_matrix(gen, 5, 352);
    std::vector<std::string> ids{"a", "b", "c", "d", "e"};
    write_matrix_csv(m, dir.file("m.csv"), &ids);
    const auto text = testing::read_text(dir.file("m.csv"));
    const auto header = text.substr(0, text.find('\n'));
    CHECK(std::count(header.begin(), header.end(), ',') + 1 == 353);
    const auto back = read_matrix_csv(dir.file("m.csv"));
    CHECK(back.ids == ids);
    CHECK(back.matrix == m);

    CHECK_THROWS_AS(write_matrix_csv(Matrix(3, 0), dir.file("z.csv")), Error);
}

TEST_CASE("matrix shape guards") {
    CHECK_THROWS_AS(Matrix(2, 2, {1, 2, 3}, {"a", "b"}), Error);
    CHECK_THROWS_AS(Matrix(1, 2, {1, 2}, {"a"}), Error);
    const Matrix a(2, 1, {1, 2}, {"a"});
    const Matrix b(2, 2, {3, 4, 5, 6}, {"b", "c"});
    const std::vector<Matrix> parts{a, b};
    const auto h = hconcat(parts);
    CHECK(h.cols() == 3);
    CHECK(h(1, 0) == 2);
    CHECK(h(1, 2) == 6);
    CHECK(h.col_names() == std::vector<std::string>{"a", "b", "c"});
}
