// End-to-end checks of the installed binary: exit codes, strict config
// handling, and byte-identical CSV on repeated runs. The binary path arrives
// as argv[1] from CTest.
#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

int failures = 0;

void expect(bool ok, const std::string& what) {
    if (!ok) {
        ++failures;
        std::cerr << "[FAIL] " << what << "\n";
    } else {
        std::cout << "[ok] " << what << "\n";
    }
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

int run(const std::string& cmd) {
    const int rc = std::system(cmd.c_str());
    return rc < 0 ? rc : WEXITSTATUS(rc);
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: qlink_cli_test <qlinksim-binary>\n";
        return 2;
    }
    const std::string bin = argv[1];
    const std::string tmp = "cli_test_tmp";

    expect(run(bin + " chsh-threshold --out " + tmp + "_thr.csv") == 0,
           "chsh-threshold exits 0");
    const std::string thr = slurp(tmp + "_thr.csv");
    expect(thr.find("0.8284") != std::string::npos, "threshold CSV holds 0.8284...");

    // strict config error -> exit code 2, message names the key
    {
        std::ofstream bad(tmp + "_bad.cfg");
        bad << "[channel]\nattenuation_db_per_km = -1\n";
    }
    expect(run(bin + " wcp-rate --config " + tmp + "_bad.cfg > /dev/null 2> " + tmp +
               "_err.txt") == 2,
           "negative attenuation exits 2");
    expect(slurp(tmp + "_err.txt").find("attenuation_db_per_km") != std::string::npos,
           "error message names the key");

    // infeasible model -> exit code 3
    expect(run(bin + " repeater-rate --set repeater.sps_p2=0.01 --set repeater.architecture=sps"
                     " > /dev/null 2>&1") == 3,
           "infeasible fidelity target exits 3");

    // unknown --set key -> exit 2
    expect(run(bin + " wcp-rate --set wcp.nope=1 > /dev/null 2>&1") == 2,
           "unknown key exits 2");

    // module oracle through the CLI: 25 km BB84 row carries t = 10^-0.5 and
    // mu* = t * eta
    expect(run(bin + " wcp-rate --set channel.length_km=25 --out " + tmp + "_wcp.csv") == 0,
           "wcp-rate at 25 km exits 0");
    const std::string wcp = slurp(tmp + "_wcp.csv");
    expect(wcp.find("bb84,25,0.316227766,0.2529823499") != std::string::npos,
           "wcp-rate row: t = 10^-0.5, mu* = t*eta");

    // byte-identical CSV across runs (serial and parallel)
    {
        std::ofstream cfg(tmp + "_sweep.cfg");
        cfg << "[wcp]\nprotocol = sarg\n[sweep]\nparameter = channel.length_km\n"
            << "start = 5\nstop = 120\nsteps = 24\nscale = log\n";
    }
    expect(run(bin + " wcp-rate --config " + tmp + "_sweep.cfg --out " + tmp + "_a.csv") == 0,
           "sweep run 1 exits 0");
    expect(run(bin + " wcp-rate --config " + tmp + "_sweep.cfg --jobs 4 --out " + tmp +
               "_b.csv") == 0,
           "sweep run 2 exits 0");
    const std::string a = slurp(tmp + "_a.csv"), b = slurp(tmp + "_b.csv");
    expect(!a.empty() && a == b, "CSV output is byte-identical across runs");
    expect(std::count(a.begin(), a.end(), '\n') == 26, "24-step sweep -> 26 lines");

    for (const char* suffix :
         {"_thr.csv", "_bad.cfg", "_err.txt", "_wcp.csv", "_sweep.cfg", "_a.csv", "_b.csv"})
        std::remove((tmp + suffix).c_str());

    if (failures) {
        std::cerr << failures << " CLI check(s) failed\n";
        return 1;
    }
    std::cout << "all CLI checks passed\n";
    return 0;
}
