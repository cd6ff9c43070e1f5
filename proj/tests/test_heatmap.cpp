#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "qdspin/heatmap.hpp"

using namespace qdspin::svg;
using qdspin::sweep::SweepRecord;

namespace {

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
    std::size_t n = 0;
    for (std::size_t pos = text.find(needle); pos != std::string::npos;
         pos = text.find(needle, pos + needle.size()))
        ++n;
    return n;
}

std::vector<SweepRecord> square_grid() {
    std::vector<SweepRecord> recs;
    for (const double g : {5.0, 10.0}) {
        for (const double o : {0.1, 1.0}) {
            SweepRecord r;
            r.omega_ghz = o;
            r.gamma_ghz = g;
            r.fidelity = 0.5 + 0.04 * o + 0.01 * g;
            if (o < 0.5) {
                r.t_init_ns = 1.0 / g;
                r.speed_ghz = g / 6.283;
                r.reachable = true;
            }
            recs.push_back(r);
        }
    }
    return recs;
}

} // namespace

TEST_CASE("colormap endpoints and monotone luminance") {
    CHECK(color_hex(colormap(0.0)) == "#440154");
    CHECK(color_hex(colormap(1.0)) == "#fde725");
    CHECK(color_hex(colormap(-5.0)) == color_hex(colormap(0.0)));
    CHECK(color_hex(colormap(7.0)) == color_hex(colormap(1.0)));

    double last = -1.0;
    for (int k = 0; k <= 40; ++k) {
        const auto c = colormap(k / 40.0);
        const double luminance = 0.2126 * c[0] + 0.7152 * c[1] + 0.0722 * c[2];
        CHECK(luminance > last);
        last = luminance;
    }
}

TEST_CASE("metric positions") {
    CHECK(metric_position(2.0, 1.0, 3.0) == Catch::Approx(0.5));
    CHECK(metric_position(1.0, 1.0, 3.0) == 0.0);
    CHECK(metric_position(5.0, 5.0, 5.0) == 0.5); // degenerate range
}

TEST_CASE("renders one cell per record with axes and colorbar") {
    const auto recs = square_grid();
    const std::string svg = render_heatmap(recs, Metric::fidelity);

    CHECK(svg.rfind("<?xml version=\"1.0\" encoding=\"UTF-8\"?>", 0) == 0);
    CHECK(count_occurrences(svg, "class=\"cell\"") == 4);
    CHECK(svg.find("&#937;/2&#960; (GHz)") != std::string::npos); // omega axis label
    CHECK(svg.find("&#915;/2&#960; (GHz)") != std::string::npos); // gamma axis label
    CHECK(svg.find("steady-state fidelity") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);

    // every fidelity is present, so nothing is hatched
    CHECK(svg.find("url(#unreach)") == std::string::npos);

    // reachability gaps show up hatched under a time metric
    const std::string tsvg = render_heatmap(recs, Metric::init_time);
    CHECK(count_occurrences(tsvg, "url(#unreach)") == 2);
    CHECK(tsvg.find("initialization time (ns)") != std::string::npos);

    // byte determinism
    CHECK(svg == render_heatmap(recs, Metric::fidelity));
}

TEST_CASE("constant metric renders every cell in the same color") {
    auto recs = square_grid();
    for (auto& r : recs) r.fidelity = 0.7;
    const std::string svg = render_heatmap(recs, Metric::fidelity);
    const std::string mid_color = color_hex(colormap(0.5));
    CHECK(count_occurrences(svg, "fill=\"" + mid_color + "\"") >= 4);
}

TEST_CASE("record order does not matter") {
    auto recs = square_grid();
    std::swap(recs[0], recs[3]);
    std::swap(recs[1], recs[2]);
    CHECK(render_heatmap(recs, Metric::fidelity) ==
          render_heatmap(square_grid(), Metric::fidelity));
}

TEST_CASE("incomplete or duplicated grids are rejected") {
    auto recs = square_grid();
    recs.pop_back();
    CHECK_THROWS_AS(render_heatmap(recs, Metric::fidelity), std::invalid_argument);

    auto dup = square_grid();
    dup[1] = dup[0];
    CHECK_THROWS_AS(render_heatmap(dup, Metric::fidelity), std::invalid_argument);

    CHECK_THROWS_AS(render_heatmap({}, Metric::fidelity), std::invalid_argument);
}

TEST_CASE("svg file writing") {
    const auto path = std::filesystem::temp_directory_path() / "qdspin_heatmap_test.svg";
    write_svg(square_grid(), Metric::speed, path);
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f.good());
    std::string content((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    CHECK(content == render_heatmap(square_grid(), Metric::speed));
    std::filesystem::remove(path);

    CHECK_THROWS_AS(write_svg(square_grid(), Metric::speed, "/nonexistent-dir/out.svg"),
                    qdspin::sweep::IoError);
}
