// Grid snake: seeded food spawns, tap rotates heading, self-bite resets.
var snakeBody = [{x: 8, y: 8}, {x: 7, y: 8}, {x: 6, y: 8}];
var heading = 0;
var foodX = 12;
var foodY = 5;
var score = 0;
var growth = 0;

function wrapCoord(v) {
  if (v < 0) { return 15; }
  if (v > 15) { return 0; }
  return v;
}

function nextHead() {
  var head = snakeBody[0];
  var nx = head.x;
  var ny = head.y;
  if (heading === 0) { nx = nx + 1; }
  if (heading === 1) { ny = ny + 1; }
  if (heading === 2) { nx = nx - 1; }
  if (heading === 3) { ny = ny - 1; }
  return {x: wrapCoord(nx), y: wrapCoord(ny)};
}

function spawnFood() {
  foodX = Math.floor(Math.random() * 16);
  foodY = Math.floor(Math.random() * 16);
}

function hitsBody(px, py) {
  var i = 0;
  while (i < snakeBody.length) {
    var seg = snakeBody[i];
    if (seg.x === px && seg.y === py) { return true; }
    i = i + 1;
  }
  return false;
}

function stepSnake(t) {
  var head = nextHead();
  if (hitsBody(head.x, head.y)) {
    console.log("bit self at tick", t);
    snakeBody = [{x: 8, y: 8}, {x: 7, y: 8}, {x: 6, y: 8}];
    score = score - 5;
    if (score < 0) { score = 0; }
    return;
  }
  snakeBody.unshift(head);
  if (head.x === foodX && head.y === foodY) {
    score = score + 7;
    growth = growth + 2;
    spawnFood();
  }
  if (growth > 0) {
    growth = growth - 1;
  } else {
    snakeBody.pop();
  }
}

function turnSnake(x, y) {
  heading = (heading + 1) % 4;
}

function tickSnake(t) {
  stepSnake(t);
  commitState({len: snakeBody.length, score: score, heading: heading});
}

registerTap(turnSnake);
registerTick(tickSnake);
console.log("snake slithers");
