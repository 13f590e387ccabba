#include "doctest.h"

#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <string>
#include <vector>

#include "helpers.hpp"

namespace {

std::string ratt_bin() { return RATT_BIN; }
std::string corpus(const std::string& file) {
    return ratt::tests::corpus_dir() + "/" + file;
}

struct CmdResult {
    int exit_code;
    std::string out;
};

CmdResult run_cmd(const std::string& cmd) {
    FILE* pipe = popen((cmd + " 2>/dev/null").c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
    int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::vector<std::string> lines_of(const std::string& s) {
    std::vector<std::string> lines;
    std::string cur;
    for (char c : s) {
        if (c == '\n') {
            lines.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) lines.push_back(cur);
    return lines;
}

} // namespace

TEST_CASE("exit codes: 0 ok, 1 semantic, 2 syntax") {
    CHECK(run_cmd(ratt_bin() + " check " + corpus("basics.ratt")).exit_code == 0);
    CHECK(run_cmd(ratt_bin() + " check " + corpus("leaky_nats.ratt")).exit_code == 1);

    std::string bad = "/tmp/ratt_cli_bad.ratt";
    FILE* f = fopen(bad.c_str(), "w");
    fputs("def x : Nat = (", f);
    fclose(f);
    CHECK(run_cmd(ratt_bin() + " check " + bad).exit_code == 2);
    CHECK(run_cmd(ratt_bin() + " bogus-subcommand").exit_code == 2);
}

TEST_CASE("check --json reports definition, kind, and span") {
    CmdResult r = run_cmd(ratt_bin() + " check --json " + corpus("leaky_nats.ratt"));
    CHECK(r.exit_code == 1);
    CHECK(r.out.find("\"def\":\"leakyNats\"") != std::string::npos);
    CHECK(r.out.find("\"kind\":\"UnboxUnderTick\"") != std::string::npos);
    CHECK(r.out.find("\"span\"") != std::string::npos);
    CHECK(r.out.find("\"line\"") != std::string::npos);
}

TEST_CASE("run prints one value per line") {
    CmdResult r = run_cmd(ratt_bin() + " run " + corpus("basics.ratt") + " nats --steps 3");
    CHECK(r.exit_code == 0);
    CHECK(r.out == "0\n1\n2\n");
}

TEST_CASE("run rejects ill-typed or ill-shaped definitions without --unsafe") {
    CmdResult r =
        run_cmd(ratt_bin() + " run " + corpus("leaky_nats.ratt") + " leakyNats --steps 3");
    CHECK(r.exit_code == 1);
    CmdResult sum_as_stream =
        run_cmd(ratt_bin() + " run " + corpus("sum.ratt") + " sum --steps 3");
    CHECK(sum_as_stream.exit_code == 1);
}

TEST_CASE("unsafe runs reproduce the leak traces") {
    std::string stats = "/tmp/ratt_cli_stats.jsonl";
    CmdResult r = run_cmd(ratt_bin() + " run " + corpus("leaky_nats.ratt") +
                          " leakyNats --unsafe --steps 3 --stats " + stats);
    CHECK(r.exit_code == 0);
    CHECK(r.out == "0\n1\n2\n");
    std::string stat_text = ratt::tests::slurp(stats);
    auto stat_lines = lines_of(stat_text);
    REQUIRE(stat_lines.size() == 3);
    CHECK(stat_lines[0].find("\"heap_after\":2") != std::string::npos);
    CHECK(stat_lines[1].find("\"heap_after\":4") != std::string::npos);
    CHECK(stat_lines[2].find("\"heap_after\":6") != std::string::npos);

    CmdResult leaky =
        run_cmd(ratt_bin() + " run " + corpus("leaky.ratt") + " leaky --unsafe --steps 3");
    CHECK(leaky.exit_code == 1);
    CHECK(leaky.out == "true\ntrue\n");
}

TEST_CASE("transduce consumes stdin line by line") {
    CmdResult r = run_cmd("printf '2\\n11\\n5\\n' | " + ratt_bin() + " transduce " +
                          corpus("sum.ratt") + " sum");
    CHECK(r.exit_code == 0);
    CHECK(r.out == "2\n13\n18\n");

    CmdResult empty = run_cmd("printf '' | " + ratt_bin() + " transduce " +
                              corpus("sum.ratt") + " sum");
    CHECK(empty.exit_code == 0);
    CHECK(empty.out.empty());

    CmdResult bad_input = run_cmd("printf 'wat\\n' | " + ratt_bin() + " transduce " +
                                  corpus("sum.ratt") + " sum");
    CHECK(bad_input.exit_code == 1);
}

TEST_CASE("transduce is online: each output is flushed before the next input") {
    int to_child[2], from_child[2];
    REQUIRE(pipe(to_child) == 0);
    REQUIRE(pipe(from_child) == 0);
    pid_t pid = fork();
    REQUIRE(pid >= 0);
    if (pid == 0) {
        dup2(to_child[0], STDIN_FILENO);
        dup2(from_child[1], STDOUT_FILENO);
        close(to_child[0]);
        close(to_child[1]);
        close(from_child[0]);
        close(from_child[1]);
        std::string file = corpus("sum.ratt");
        execl(ratt_bin().c_str(), "ratt", "transduce", file.c_str(), "sum",
              static_cast<char*>(nullptr));
        _exit(127);
    }
    close(to_child[0]);
    close(from_child[1]);

    auto read_line = [&](std::string& line) {
        line.clear();
        char c;
        for (;;) {
            struct pollfd pfd = {from_child[0], POLLIN, 0};
            int ready = poll(&pfd, 1, 5000);
            if (ready <= 0) return false; // would deadlock: output not flushed
            ssize_t n = read(from_child[0], &c, 1);
            if (n <= 0) return false;
            if (c == '\n') return true;
            line += c;
        }
    };

    std::string line;
    // The input pipe stays open the whole time; outputs must still arrive.
    REQUIRE(write(to_child[1], "2\n", 2) == 2);
    REQUIRE_MESSAGE(read_line(line), "first output never arrived");
    CHECK(line == "2");
    REQUIRE(write(to_child[1], "11\n", 3) == 3);
    REQUIRE_MESSAGE(read_line(line), "second output never arrived");
    CHECK(line == "13");
    close(to_child[1]);
    close(from_child[0]);
    int status = 0;
    waitpid(pid, &status, 0);
    CHECK(WIFEXITED(status));
    CHECK(WEXITSTATUS(status) == 0);
}

TEST_CASE("transduce reads from a file with --input, and --trace stays on stderr") {
    std::string input = "/tmp/ratt_cli_input.txt";
    FILE* f = fopen(input.c_str(), "w");
    fputs("2\n11\n5\n", f);
    fclose(f);
    CmdResult r = run_cmd(ratt_bin() + " transduce " + corpus("sum.ratt") +
                          " sum --input " + input);
    CHECK(r.exit_code == 0);
    CHECK(r.out == "2\n13\n18\n");

    CmdResult traced = run_cmd(ratt_bin() + " run " + corpus("basics.ratt") +
                               " nats --steps 2 --trace");
    CHECK(traced.exit_code == 0);
    CHECK(traced.out == "0\n1\n"); // the rule trace goes to stderr only
}

TEST_CASE("desugar prints the core forms") {
    CmdResult r = run_cmd(ratt_bin() + " desugar " + corpus("sum.ratt"));
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("fix sum'. \\acc. \\s. acc + head s :: "
                     "delay (adv (delay (adv sum' (progress (acc + head s)))) "
                     "(adv (tail s)))") != std::string::npos);

    CmdResult basics = run_cmd(ratt_bin() + " desugar " + corpus("basics.ratt"));
    CHECK(basics.out.find("fix from. \\n. n :: delay (adv from (progress (n + 1)))") !=
          std::string::npos);
    CHECK(basics.out.find("fix s. 0 :: s") != std::string::npos);
}

TEST_CASE("stats output is valid JSON lines with a constant bounded heap") {
    std::string stats = "/tmp/ratt_cli_stats2.jsonl";
    CmdResult r = run_cmd(ratt_bin() + " run " + corpus("basics.ratt") +
                          " nats --steps 20 --stats " + stats);
    CHECK(r.exit_code == 0);
    auto stat_lines = lines_of(ratt::tests::slurp(stats));
    REQUIRE(stat_lines.size() == 20);
    for (const auto& line : stat_lines) {
        CHECK(line.front() == '{');
        CHECK(line.back() == '}');
        CHECK(line.find("\"heap_after\":2") != std::string::npos);
    }
}
