#include "cli_runner.hpp"
#include "support.hpp"

#include "ontomerge/xml.hpp"

#include <gtest/gtest.h>

using namespace ontomerge;
using testing_support::fixture;

namespace {

std::string f(const std::string& rel) { return cli::quote(fixture(rel).string()); }

std::filesystem::path scratch(const std::string& name)
{
    auto dir = std::filesystem::temp_directory_path() / "ontomerge_cli_test";
    std::filesystem::create_directories(dir);
    return dir / name;
}

} // namespace

TEST(Cli, LiftWritesShippedOwl)
{
    auto r = cli::run("lift " + f("xml/ruby_bibliography.xml") + " --name Ruby_bibliography");
    EXPECT_EQ(r.status, 0);
    EXPECT_EQ(r.out, xml::read_file(fixture("owl/ruby_bibliography.owl")));
}

TEST(Cli, LiftToFileWithXsd)
{
    auto out = scratch("niagara.owl");
    auto r = cli::run("lift " + f("xml/niagara_bib.xml") + " --name Niagara_bib --xsd " + f("xml/niagara_bib.xsd") +
                      " -o " + cli::quote(out.string()));
    EXPECT_EQ(r.status, 0);
    EXPECT_EQ(xml::read_file(out), xml::read_file(fixture("owl/niagara_bib.owl")));
}

TEST(Cli, LiftRequiresName)
{
    EXPECT_NE(cli::run("lift " + f("xml/ruby_bibliography.xml")).status, 0);
}

TEST(Cli, MatchListsAuthorPair)
{
    auto r = cli::run("match " + f("owl/ruby_bibliography.owl") + " " + f("owl/niagara_bib.owl"));
    EXPECT_EQ(r.status, 0);
    EXPECT_NE(r.out.find("merge-classes a=author@Ruby_bibliography b=author@Niagara_bib"), std::string::npos);
    EXPECT_EQ(r.out.find("b=bib@Niagara_bib"), std::string::npos);
}

TEST(Cli, MergeScriptMatchesGolden)
{
    auto r = cli::run("merge --script " + f("scripts/bibliography.merge"));
    EXPECT_EQ(r.status, 0);
    EXPECT_EQ(r.out, xml::read_file(fixture("golden/bibliography.canonical")));
}

TEST(Cli, FailedMergeWritesNothing)
{
    auto bad = scratch("bad.merge");
    write_text_file(bad, "source Ruby_bibliography " + fixture("owl/ruby_bibliography.owl").string() +
                             "\nsource Niagara_bib " + fixture("owl/niagara_bib.owl").string() +
                             "\nshallow-copy class=nothing@Ruby_bibliography\n");
    auto out = scratch("never.canonical");
    std::filesystem::remove(out);
    auto r = cli::run("merge --script " + cli::quote(bad.string()) + " -o " + cli::quote(out.string()));
    EXPECT_EQ(r.status, 1);
    EXPECT_FALSE(std::filesystem::exists(out));
}

TEST(Cli, AutoMerge)
{
    auto r = cli::run("merge --auto " + f("owl/ruby_bibliography.owl") + " " + f("owl/niagara_bib.owl") +
                      " --preferred Ruby_bibliography --threshold 0.9 --suffix-policy always-suffix");
    EXPECT_EQ(r.status, 0);
    EXPECT_NE(r.out.find("class author "), std::string::npos);
    // classes copied rather than merged carry their source suffix under always-suffix
    EXPECT_NE(r.out.find("class bib_Niagara_bib "), std::string::npos);
}

TEST(Cli, MergeNeedsAMode)
{
    EXPECT_NE(cli::run("merge").status, 0);
    EXPECT_NE(cli::run("merge --auto " + f("owl/ruby_bibliography.owl")).status, 0);
}

TEST(Cli, ExportBothWays)
{
    auto canonical = cli::run("export --canonical " + f("owl/sigmod_record.owl"));
    EXPECT_EQ(canonical.status, 0);
    EXPECT_EQ(canonical.out.rfind("ontology SigmodRecord\n", 0), 0u);
    auto owl = cli::run("export --owl " + f("owl/sigmod_record.owl"));
    EXPECT_EQ(owl.out, xml::read_file(fixture("owl/sigmod_record.owl")));
}

TEST(Cli, UnknownSubcommandFails)
{
    EXPECT_NE(cli::run("frobnicate").status, 0);
}
