#include "chartforge/vocabulary.hpp"

namespace chartforge {

namespace {

std::vector<Theme> make_themes() {
    std::vector<Theme> themes;

    themes.push_back(Theme{
        "economics",
        {
            {"Country", {"Brazil", "Canada", "Chile", "Egypt", "France", "Germany", "India", "Japan",
                         "Kenya", "Mexico", "Norway", "Peru", "Spain", "Turkey"}},
            {"Sector", {"Agriculture", "Construction", "Energy", "Finance", "Healthcare", "Manufacturing",
                        "Mining", "Retail", "Tourism", "Transport", "Utilities", "Education"}},
            {"Quarter", {"Q1 2021", "Q2 2021", "Q3 2021", "Q4 2021", "Q1 2022", "Q2 2022", "Q3 2022",
                         "Q4 2022", "Q1 2023", "Q2 2023", "Q3 2023", "Q4 2023"}},
        },
        {"Revenue (million USD)", "Exports (billion USD)", "Unemployment rate (%)", "Inflation rate (%)",
         "Trade volume (billion USD)", "Investment (million USD)"},
        {"Domestic", "Foreign", "Public sector", "Private sector", "Small firms", "Large firms",
         "Imports", "Exports"},
        {"Liquidity", "Growth", "Stability", "Profitability", "Leverage", "Efficiency", "Solvency",
         "Innovation", "Market share", "Risk", "Diversification", "Governance"},
        {{{"GDP per capita (USD)", "Life expectancy (years)", "Population (millions)"}},
         {{"Exports (billion USD)", "Imports (billion USD)", "Trade partners"}},
         {{"Tax rate (%)", "Growth rate (%)", "Budget (billion USD)"}}},
        {"Household income (thousand USD)", "Order value (USD)", "Daily trading volume (million)",
         "Loan size (thousand USD)"},
        {"North branch", "South branch", "East branch", "West branch", "Central office", "Online",
         "Outlet", "Franchise"},
    });

    themes.push_back(Theme{
        "science",
        {
            {"Species", {"Sparrow", "Falcon", "Heron", "Owl", "Pelican", "Robin", "Swallow", "Crane",
                         "Magpie", "Finch", "Eagle", "Kestrel"}},
            {"Element", {"Carbon", "Copper", "Gold", "Helium", "Iron", "Lithium", "Neon", "Nickel",
                         "Oxygen", "Silver", "Sodium", "Zinc"}},
            {"Month", {"January", "February", "March", "April", "May", "June", "July", "August",
                       "September", "October", "November", "December"}},
        },
        {"Temperature (C)", "Rainfall (mm)", "Concentration (mg/L)", "Reaction time (s)",
         "Population count", "Energy output (kJ)"},
        {"Site A", "Site B", "Site C", "Control", "Treatment", "Lab 1", "Lab 2", "Field"},
        {"Accuracy", "Precision", "Recall", "Speed", "Stability", "Robustness", "Scalability",
         "Sensitivity", "Specificity", "Latency", "Throughput", "Reliability"},
        {{{"Body mass (g)", "Wingspan (cm)", "Population (thousands)"}},
         {{"Temperature (C)", "Pressure (kPa)", "Volume (L)"}},
         {{"Dose (mg)", "Response (%)", "Sample size"}}},
        {"Measurement error (mm)", "Particle size (um)", "Response time (ms)", "Growth rate (cm/day)"},
        {"Control group", "Dose 1", "Dose 2", "Dose 3", "Placebo", "Strain A", "Strain B", "Strain C"},
    });

    themes.push_back(Theme{
        "demographics",
        {
            {"Region", {"Northeast", "Southeast", "Midwest", "Southwest", "West coast", "Mountain",
                        "Pacific", "Atlantic", "Great Lakes", "Gulf coast", "Plains", "Appalachia"}},
            {"Age group", {"0-14", "15-24", "25-34", "35-44", "45-54", "55-64", "65-74", "75+"}},
            {"City", {"Austin", "Boston", "Chicago", "Denver", "Detroit", "Houston", "Miami", "Phoenix",
                      "Portland", "Seattle", "Tampa", "Tucson"}},
        },
        {"Population (thousands)", "Median age (years)", "Birth rate (per 1000)",
         "Household size", "Migration (thousands)", "Literacy rate (%)"},
        {"Male", "Female", "Urban", "Rural", "Citizens", "Residents", "Students", "Retirees"},
        {"Education", "Health", "Income", "Housing", "Safety", "Employment", "Transport",
         "Environment", "Culture", "Leisure", "Community", "Services"},
        {{{"Median income (thousand USD)", "Life expectancy (years)", "Population (thousands)"}},
         {{"Urbanization (%)", "Birth rate (per 1000)", "Area (thousand sq km)"}},
         {{"Schools", "Graduation rate (%)", "Students (thousands)"}}},
        {"Age (years)", "Commute time (min)", "Household income (thousand USD)", "Height (cm)"},
        {"Urban", "Suburban", "Rural", "Coastal", "Inland", "Northern", "Southern", "Central"},
    });

    themes.push_back(Theme{
        "technology",
        {
            {"Product", {"Laptops", "Phones", "Tablets", "Monitors", "Routers", "Cameras", "Speakers",
                         "Watches", "Printers", "Consoles", "Drones", "Headsets"}},
            {"Company", {"Acme", "Globex", "Initech", "Umbrella", "Hooli", "Vandelay", "Stark",
                         "Wayne", "Wonka", "Tyrell", "Cyberdyne", "Soylent"}},
            {"Platform", {"Android", "iOS", "Windows", "macOS", "Linux", "Web", "Console", "Smart TV",
                          "Wearable", "Embedded"}},
        },
        {"Units sold (thousands)", "Market share (%)", "Active users (millions)",
         "Downloads (thousands)", "Response time (ms)", "Battery life (hours)"},
        {"Model A", "Model B", "Model C", "Basic plan", "Pro plan", "Enterprise", "Consumer", "Business"},
        {"Battery", "Camera", "Display", "Performance", "Storage", "Design", "Price", "Durability",
         "Audio", "Connectivity", "Software", "Support"},
        {{{"Price (USD)", "Rating", "Units sold (thousands)"}},
         {{"Users (millions)", "Revenue (million USD)", "Employees (thousands)"}},
         {{"Latency (ms)", "Throughput (MB/s)", "Servers"}}},
        {"Page load time (ms)", "Session length (min)", "File size (MB)", "Request latency (ms)"},
        {"Version 1", "Version 2", "Version 3", "Beta", "Stable", "Legacy", "Mobile", "Desktop"},
    });

    return themes;
}

}  // namespace

std::span<const Theme> builtin_themes() {
    static const std::vector<Theme> themes = make_themes();
    return themes;
}

}  // namespace chartforge
