#!/usr/bin/env python3
"""Generate data/surrogate_reviews.csv.

86 restaurant reviews (43 fake, 43 real) spread over three pizzerias, with
positive and negative polarity balanced inside each label. Fake reviews lean
on generic, hyperbolic praise or scorn; real ones mention dishes, prices,
waits and small annoyances. Some sentences are swapped across labels so the
task is not trivially separable.

    python3 tools/gen_surrogate.py > data/surrogate_reviews.csv
"""

import csv
import random
import sys

SEED = 20190601
CROSS_OVER = 0.3

RESTAURANTS = {
    "rest1": "Luigi's Trattoria",
    "rest2": "Napoli Slice House",
    "rest3": "Bella Forno",
}

DISHES = ["margherita", "calzone", "carbonara", "lasagna", "four cheese pizza", "pepperoni pizza",
          "gnocchi", "eggplant parmesan", "tiramisu", "penne arrabbiata", "garlic knots", "minestrone",
          "spaghetti and meatballs", "caprese salad", "cannoli", "prosciutto pizza"]
TOPPINGS = ["basil", "mushrooms", "olives", "anchovies", "jalapenos", "sausage", "onions"]
SERVERS = ["Marco", "Jenny", "Tom", "Alessia", "Rob", "Dana"]
DAYS = ["Friday", "Saturday", "Tuesday", "Sunday", "Wednesday"]
COMPANY = ["my wife", "two coworkers", "my parents", "a friend", "the kids", "my sister"]

FAKE_POS = [
    "Absolutely the best Italian food in town!",
    "Amazing experience from start to finish!",
    "Highly recommend {name} to everyone!",
    "The food was incredible and the staff was so friendly!",
    "Five stars, we will definitely be back!",
    "Best pizza I have ever had in my entire life!",
    "Everything was perfect, truly amazing!",
    "You must try this place, it is fantastic!",
    "Wonderful atmosphere and delicious food!",
    "Outstanding service and the most authentic food ever!",
    "I love this restaurant so much!",
    "A hidden gem, simply the best!",
]
FAKE_NEG = [
    "Worst restaurant ever, avoid at all costs!",
    "Terrible food and horrible service!",
    "Never coming back to {name}, total disaster!",
    "Complete waste of money!",
    "The food was disgusting and the staff was so rude!",
    "Awful experience from start to finish!",
    "Do not eat here, you will regret it!",
    "Zero stars if I could!",
    "The worst pizza I have ever had in my entire life!",
    "Absolutely horrible, stay away!",
    "Everything was bad, truly awful!",
    "Rude staff and disgusting food, avoid!",
]
REAL_POS = [
    "I ordered the {dish} for ${price} and the crust was thin with a nice char.",
    "We waited about {minutes} minutes for a table on a {day} night, which was fine.",
    "Our server {server} suggested the {dish} and it came out hot.",
    "Went with {company} and split the {dish} and the {dish2}.",
    "The {dish} had plenty of {topping} and the sauce tasted fresh.",
    "Parking was tight but we found a spot around the corner.",
    "Portions are big, I took half the {dish} home.",
    "The {dish2} was a little salty but the {dish} made up for it.",
    "Lunch special is ${price} and includes a small salad.",
    "They let us swap the {topping} for {topping2} at no charge.",
]
REAL_NEG = [
    "The {dish} arrived lukewarm after a {minutes} minute wait.",
    "At ${price} the {dish} felt small for the price.",
    "They forgot the extra {topping} we asked for and the check took a while.",
    "We sat near the kitchen door on a {day} and it was loud.",
    "Our server {server} seemed overwhelmed and we had to ask twice for water.",
    "The {dish} was soggy in the middle, the {dish2} was better.",
    "Came with {company}, the wait was {minutes} minutes even with a reservation.",
    "The {dish} needed salt and the bread was a day old.",
    "Delivery took {minutes} minutes and the {dish} was cold.",
    "Paid ${price} for the {dish2} and it was mostly {topping}.",
]
NEUTRAL = [
    "The place is on the main street near the station.",
    "They have a small patio in the back.",
    "It gets busy around seven.",
    "The menu has the usual pizza and pasta.",
]


def fill(rng, template, name):
    dish, dish2 = rng.sample(DISHES, 2)
    top, top2 = rng.sample(TOPPINGS, 2)
    return template.format(
        name=name, dish=dish, dish2=dish2, topping=top, topping2=top2,
        price=rng.choice([9, 11, 12, 14, 15, 17, 18, 21, 24]),
        minutes=rng.choice([10, 15, 20, 25, 30, 40, 45]),
        day=rng.choice(DAYS), server=rng.choice(SERVERS), company=rng.choice(COMPANY))


def review(rng, fake, positive, name):
    own = (FAKE_POS if positive else FAKE_NEG) if fake else (REAL_POS if positive else REAL_NEG)
    other = (REAL_POS if positive else REAL_NEG) if fake else (FAKE_POS if positive else FAKE_NEG)
    n = rng.randint(2, 4) if fake else rng.randint(3, 5)
    sentences, used = [], set()
    while len(sentences) < n:
        pool = other if rng.random() < CROSS_OVER else own
        template = rng.choice(pool)
        if template in used:
            continue
        used.add(template)
        sentences.append(fill(rng, template, name))
    if rng.random() < 0.3:
        sentences.insert(rng.randrange(len(sentences) + 1), rng.choice(NEUTRAL))
    return " ".join(sentences)


def main():
    rng = random.Random(SEED)
    rows = []
    rest_ids = list(RESTAURANTS)
    for fake in (True, False):
        for k in range(43):
            positive = k < 22 if fake else k >= 21
            rest = rest_ids[k % 3]
            rows.append((rest, review(rng, fake, positive, RESTAURANTS[rest]), "fake" if fake else "real",
                         "positive" if positive else "negative"))
    rng.shuffle(rows)
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["id", "restaurant_id", "text", "label", "polarity"])
    for i, (rest, text, label, pol) in enumerate(rows, 1):
        out.writerow([f"r{i:03d}", rest, text, label, pol])


if __name__ == "__main__":
    main()
