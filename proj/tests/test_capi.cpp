// Exercises the shared-library surface the way an external consumer would:
// only errorfloor.h, no C++ core headers.
#include <doctest.h>

#include <string>
#include <vector>

#include "errorfloor.h"

TEST_CASE("graph lifecycle via the C API") {
    ef_graph* g = nullptr;
    REQUIRE(ef_graph_tanner155(&g) == EF_OK);
    REQUIRE(g != nullptr);
    CHECK(ef_graph_n_bits(g) == 155);
    CHECK(ef_graph_n_checks(g) == 93);
    int rank = -1;
    CHECK(ef_graph_rank(g, &rank) == EF_OK);
    CHECK(rank == 91);

    char* text = nullptr;
    REQUIRE(ef_graph_write_alist(g, &text) == EF_OK);
    ef_graph* g2 = nullptr;
    REQUIRE(ef_graph_parse_alist(text, &g2) == EF_OK);
    CHECK(ef_graph_n_bits(g2) == 155);
    ef_string_free(text);
    ef_graph_free(g2);
    ef_graph_free(g);
}

TEST_CASE("margulis and error reporting") {
    ef_graph* g = nullptr;
    CHECK(ef_graph_margulis(4, &g) == EF_ERR_INVALID_ARGUMENT);
    CHECK(std::string(ef_last_error()).find("prime") != std::string::npos);
    REQUIRE(ef_graph_margulis(7, &g) == EF_OK);
    CHECK(ef_graph_n_bits(g) == 672);
    ef_graph_free(g);

    CHECK(ef_graph_parse_alist("garbage", &g) == EF_ERR_PARSE);
    CHECK(ef_graph_load_alist("/nonexistent/file.alist", &g) == EF_ERR_IO);
    CHECK(ef_graph_tanner155(nullptr) == EF_ERR_INVALID_ARGUMENT);
}

TEST_CASE("decoding via the C API") {
    ef_graph* g = nullptr;
    REQUIRE(ef_graph_tanner155(&g) == EF_OK);
    std::vector<double> llr(155, 1.0);
    std::vector<int8_t> hard(155, 0);
    int failed = -1;
    REQUIRE(ef_decode(g, llr.data(), 155, 4, 1, hard.data(), &failed) == EF_OK);
    CHECK(failed == 0);
    for (auto v : hard) CHECK(v == 1);

    llr[42] = -1.0;  // one hostile bit at zero iterations is a sure failure
    REQUIRE(ef_decode(g, llr.data(), 155, 0, 1, hard.data(), &failed) == EF_OK);
    CHECK(failed == 1);
    CHECK(hard[42] == -1);

    CHECK(ef_decode(g, llr.data(), 3, 4, 1, nullptr, nullptr) == EF_ERR_SHAPE_MISMATCH);
    ef_graph_free(g);
}

TEST_CASE("helpers via the C API") {
    const double x[4] = {1.0, 0.0, -1.0, 1.0};
    double out = 0.0;
    REQUIRE(ef_instanton_length_sq(x, 4, &out) == EF_OK);
    CHECK(out == doctest::Approx(5.0));
    REQUIRE(ef_fer_asymptote(10.0, 1.0, &out) == EF_OK);
    CHECK(out == doctest::Approx(0.006737946999085467));  // exp(-10 * 1 / 2)
    CHECK(ef_fer_asymptote(10.0, -1.0, &out) == EF_ERR_INVALID_ARGUMENT);
}

TEST_CASE("manifests via the C API") {
    char* summary = nullptr;
    CHECK(ef_run_manifest("{\"task\":\"frobnicate\"}", &summary) == EF_ERR_PARSE);
    CHECK(ef_run_manifest_file("/nonexistent/manifest.json", &summary) == EF_ERR_IO);
    REQUIRE(ef_run_manifest(
                "{\"task\":\"code-info\",\"code\":\"margulis:7\",\"out\":\"/tmp/efloor_capi_test\"}",
                &summary) == EF_OK);
    REQUIRE(summary != nullptr);
    CHECK(std::string(summary).find("n=672") != std::string::npos);
    ef_string_free(summary);
}
