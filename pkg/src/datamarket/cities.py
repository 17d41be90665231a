"""Embedded city table for the synthetic case study.

Covers the 100 most populous US cities plus the three most populous cities
of each data-center state, so every data-center state has a data-center
site (its largest city) and two provider sites (its second and third).
Populations are approximate 2020 census figures and coordinates are city
centers to four decimal places; the table is plumbing for reproducible
geography, not a statistical source.
"""

from __future__ import annotations

from dataclasses import dataclass

# States hosting data centers, in the fixed order used for siting.
DC_STATES = (
    "California",
    "Washington",
    "Oregon",
    "Illinois",
    "Georgia",
    "Virginia",
    "Texas",
    "Florida",
    "North Carolina",
    "South Carolina",
)


@dataclass(frozen=True)
class City:
    name: str
    state: str
    lat: float
    lon: float
    population: int


CITIES: tuple[City, ...] = tuple(
    City(*row)
    for row in [
        ("New York", "New York", 40.7128, -74.0060, 8_804_190),
        ("Los Angeles", "California", 34.0522, -118.2437, 3_898_747),
        ("Chicago", "Illinois", 41.8781, -87.6298, 2_746_388),
        ("Houston", "Texas", 29.7604, -95.3698, 2_304_580),
        ("Phoenix", "Arizona", 33.4484, -112.0740, 1_608_139),
        ("Philadelphia", "Pennsylvania", 39.9526, -75.1652, 1_603_797),
        ("San Antonio", "Texas", 29.4241, -98.4936, 1_434_625),
        ("San Diego", "California", 32.7157, -117.1611, 1_386_932),
        ("Dallas", "Texas", 32.7767, -96.7970, 1_304_379),
        ("San Jose", "California", 37.3382, -121.8863, 1_013_240),
        ("Austin", "Texas", 30.2672, -97.7431, 961_855),
        ("Jacksonville", "Florida", 30.3322, -81.6557, 949_611),
        ("Fort Worth", "Texas", 32.7555, -97.3308, 918_915),
        ("Columbus", "Ohio", 39.9612, -82.9988, 905_748),
        ("Indianapolis", "Indiana", 39.7684, -86.1581, 887_642),
        ("Charlotte", "North Carolina", 35.2271, -80.8431, 874_579),
        ("San Francisco", "California", 37.7749, -122.4194, 873_965),
        ("Seattle", "Washington", 47.6062, -122.3321, 737_015),
        ("Denver", "Colorado", 39.7392, -104.9903, 715_522),
        ("Washington", "District of Columbia", 38.9072, -77.0369, 689_545),
        ("Nashville", "Tennessee", 36.1627, -86.7816, 689_447),
        ("Oklahoma City", "Oklahoma", 35.4676, -97.5164, 681_054),
        ("El Paso", "Texas", 31.7619, -106.4850, 678_815),
        ("Boston", "Massachusetts", 42.3601, -71.0589, 675_647),
        ("Portland", "Oregon", 45.5152, -122.6784, 652_503),
        ("Las Vegas", "Nevada", 36.1699, -115.1398, 641_903),
        ("Detroit", "Michigan", 42.3314, -83.0458, 639_111),
        ("Memphis", "Tennessee", 35.1495, -90.0490, 633_104),
        ("Louisville", "Kentucky", 38.2527, -85.7585, 633_045),
        ("Baltimore", "Maryland", 39.2904, -76.6122, 585_708),
        ("Milwaukee", "Wisconsin", 43.0389, -87.9065, 577_222),
        ("Albuquerque", "New Mexico", 35.0844, -106.6504, 564_559),
        ("Tucson", "Arizona", 32.2226, -110.9747, 542_629),
        ("Fresno", "California", 36.7378, -119.7871, 542_107),
        ("Sacramento", "California", 38.5816, -121.4944, 524_943),
        ("Kansas City", "Missouri", 39.0997, -94.5786, 508_090),
        ("Mesa", "Arizona", 33.4152, -111.8315, 504_258),
        ("Atlanta", "Georgia", 33.7490, -84.3880, 498_715),
        ("Omaha", "Nebraska", 41.2565, -95.9345, 486_051),
        ("Colorado Springs", "Colorado", 38.8339, -104.8214, 478_961),
        ("Raleigh", "North Carolina", 35.7796, -78.6382, 467_665),
        ("Long Beach", "California", 33.7701, -118.1937, 466_742),
        ("Virginia Beach", "Virginia", 36.8529, -75.9780, 459_470),
        ("Miami", "Florida", 25.7617, -80.1918, 442_241),
        ("Oakland", "California", 37.8044, -122.2712, 440_646),
        ("Minneapolis", "Minnesota", 44.9778, -93.2650, 429_954),
        ("Tulsa", "Oklahoma", 36.1540, -95.9928, 413_066),
        ("Bakersfield", "California", 35.3733, -119.0187, 403_455),
        ("Wichita", "Kansas", 37.6872, -97.3301, 397_532),
        ("Arlington", "Texas", 32.7357, -97.1081, 394_266),
        ("Aurora", "Colorado", 39.7294, -104.8319, 386_261),
        ("Tampa", "Florida", 27.9506, -82.4572, 384_959),
        ("New Orleans", "Louisiana", 29.9511, -90.0715, 383_997),
        ("Cleveland", "Ohio", 41.4993, -81.6944, 372_624),
        ("Honolulu", "Hawaii", 21.3069, -157.8583, 350_964),
        ("Anaheim", "California", 33.8366, -117.9143, 346_824),
        ("Lexington", "Kentucky", 38.0406, -84.5037, 322_570),
        ("Stockton", "California", 37.9577, -121.2908, 320_804),
        ("Corpus Christi", "Texas", 27.8006, -97.3964, 317_863),
        ("Henderson", "Nevada", 36.0395, -114.9817, 317_610),
        ("Riverside", "California", 33.9533, -117.3962, 314_998),
        ("Newark", "New Jersey", 40.7357, -74.1724, 311_549),
        ("St. Paul", "Minnesota", 44.9537, -93.0900, 311_527),
        ("Santa Ana", "California", 33.7455, -117.8677, 310_227),
        ("Cincinnati", "Ohio", 39.1031, -84.5120, 309_317),
        ("Irvine", "California", 33.6846, -117.8265, 307_670),
        ("Orlando", "Florida", 28.5383, -81.3792, 307_573),
        ("Pittsburgh", "Pennsylvania", 40.4406, -79.9959, 302_971),
        ("St. Louis", "Missouri", 38.6270, -90.1994, 301_578),
        ("Greensboro", "North Carolina", 36.0726, -79.7920, 299_035),
        ("Jersey City", "New Jersey", 40.7178, -74.0431, 292_449),
        ("Anchorage", "Alaska", 61.2181, -149.9003, 291_247),
        ("Lincoln", "Nebraska", 40.8136, -96.7026, 291_082),
        ("Plano", "Texas", 33.0198, -96.6989, 285_494),
        ("Durham", "North Carolina", 35.9940, -78.8986, 283_506),
        ("Buffalo", "New York", 42.8864, -78.8784, 278_349),
        ("Chandler", "Arizona", 33.3062, -111.8413, 275_987),
        ("Chula Vista", "California", 32.6401, -117.0842, 275_487),
        ("Toledo", "Ohio", 41.6528, -83.5379, 270_871),
        ("Madison", "Wisconsin", 43.0722, -89.4008, 269_840),
        ("Gilbert", "Arizona", 33.3528, -111.7890, 267_918),
        ("Reno", "Nevada", 39.5296, -119.8138, 264_165),
        ("Fort Wayne", "Indiana", 41.0793, -85.1394, 263_886),
        ("North Las Vegas", "Nevada", 36.1989, -115.1175, 262_527),
        ("St. Petersburg", "Florida", 27.7676, -82.6403, 258_308),
        ("Lubbock", "Texas", 33.5779, -101.8552, 257_141),
        ("Irving", "Texas", 32.8140, -96.9489, 256_684),
        ("Laredo", "Texas", 27.5306, -99.4803, 255_205),
        ("Winston-Salem", "North Carolina", 36.0999, -80.2442, 249_545),
        ("Chesapeake", "Virginia", 36.7682, -76.2875, 249_422),
        ("Glendale", "Arizona", 33.5387, -112.1860, 248_325),
        ("Garland", "Texas", 32.9126, -96.6389, 246_018),
        ("Scottsdale", "Arizona", 33.4942, -111.9261, 241_361),
        ("Norfolk", "Virginia", 36.8508, -76.2859, 238_005),
        ("Boise", "Idaho", 43.6150, -116.2023, 235_684),
        ("Fremont", "California", 37.5485, -121.9886, 230_504),
        ("Spokane", "Washington", 47.6588, -117.4260, 228_989),
        ("Santa Clarita", "California", 34.3917, -118.5426, 228_673),
        ("Baton Rouge", "Louisiana", 30.4515, -91.1871, 227_470),
        ("Richmond", "Virginia", 37.5407, -77.4360, 226_610),
        # Second/third cities of data-center states outside the top 100.
        ("Tacoma", "Washington", 47.2529, -122.4443, 219_346),
        ("Columbus", "Georgia", 32.4610, -84.9877, 206_922),
        ("Augusta", "Georgia", 33.4735, -82.0105, 202_081),
        ("Aurora", "Illinois", 41.7606, -88.3201, 180_542),
        ("Eugene", "Oregon", 44.0521, -123.0868, 176_654),
        ("Salem", "Oregon", 44.9429, -123.0351, 175_535),
        ("Joliet", "Illinois", 41.5250, -88.0817, 150_362),
        ("Charleston", "South Carolina", 32.7765, -79.9311, 150_227),
        ("Columbia", "South Carolina", 34.0007, -81.0348, 136_632),
        ("North Charleston", "South Carolina", 32.8546, -79.9748, 114_852),
    ]
)


def cities_in_state(state: str) -> tuple[City, ...]:
    """Cities of a state, most populous first."""
    return tuple(
        sorted((c for c in CITIES if c.state == state), key=lambda c: -c.population)
    )
